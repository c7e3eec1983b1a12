#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nehari/constants.hpp"
#include "nehari/errors.hpp"
#include "nehari/fibering.hpp"
#include "nehari/solver.hpp"

using namespace nehari;

namespace {

/// Power(2), N = 4, q = 4 on (0,1) with `cells` cells and a centred bump
/// rescaled to half the source threshold. Members are built in place
/// against the mesh member so their mesh pointers stay valid.
struct Problem {
    Mesh mesh;
    SEstimate S;
    ThresholdSet th;
    ProblemData data;

    explicit Problem(int cells)
        : mesh(1.0, cells),
          S(probe_S(mesh)),
          th(thresholds_from(S.value,
                             extract_exponents(PhiSpec::power(2.0), 4), 4.0)),
          data(build_data(mesh, th)) {}

private:
    static SEstimate probe_S(const Mesh& mesh) {
        ScalarField probe_f(mesh);
        const ProblemData probe =
            ProblemData::make(PhiSpec::power(2.0), 4, mesh, probe_f);
        return estimate_S(probe, 42, 4);
    }

    static ProblemData build_data(const Mesh& mesh, const ThresholdSet& th) {
        ScalarField shape = ScalarField::from_function(
            mesh, [](double x, double) {
                return std::exp(-std::pow((x - 0.5) / 0.15, 2));
            });
        ScalarField f = auto_scale_f(shape, 0.5, th.Lambda, 4.0);
        return ProblemData::make(PhiSpec::power(2.0), 4, mesh, std::move(f));
    }
};

SolverOptions quick_options() {
    SolverOptions o;
    o.starts = 4;
    o.budget = 3000;
    o.seed = 42;
    return o;
}

} // namespace

TEST_CASE("branch projection lands on the manifold with the right class") {
    const Problem p(48);
    ScalarField dir = ScalarField::from_function(
        p.mesh, [](double x, double) { return std::sin(M_PI * x); });

    for (NehariClass branch : {NehariClass::Plus, NehariClass::Minus}) {
        const ScalarField w = project_to_branch(dir, p.data, branch);
        const FiberCache cache(w, p.data);
        CHECK(std::abs(psi(w, p.data)) <= 1e-8 * cache.scale());
        CHECK(classify(w, p.data) == branch);
        // Projecting a projected field is the identity up to root solve
        // tolerance.
        const ScalarField w2 = project_to_branch(w, p.data, branch);
        for (int n = 0; n < w.size(); ++n) {
            CHECK(w2[n] == doctest::Approx(w[n]).epsilon(1e-7));
        }
    }
}

TEST_CASE("plus-branch minimization yields a negative-energy ground state") {
    const Problem p(48);
    const SolveResult r = minimize_branch(p.data, NehariClass::Plus,
                                          quick_options());
    CHECK(r.converged);
    CHECK(r.branch == NehariClass::Plus);
    CHECK(r.J_value < 0.0);
    const FiberCache cache(r.u, p.data);
    CHECK(std::abs(r.psi_value) <= 1e-8 * cache.scale());
    CHECK(r.residual_rel <= 1e-6);
    // Nonnegative source: the minimizer is reported nonnegative.
    CHECK(r.u.min_value() >= -1e-12);
    // No worse than the projected fundamental mode it started from.
    ScalarField dir = ScalarField::from_function(
        p.mesh, [](double x, double) { return std::sin(M_PI * x); });
    const ScalarField w =
        project_to_branch(dir, p.data, NehariClass::Plus);
    CHECK(r.J_value <= energy(w, p.data) + 1e-12);
    CHECK(int(r.start_outcomes.size()) == quick_options().starts);
    CHECK(r.best_start >= 0);
    CHECK(!r.tied_starts.empty());
    CHECK(!r.history.empty());
}

TEST_CASE("minus-branch minimization stays above the energy floor") {
    const Problem p(48);
    const SolveResult r = minimize_branch(p.data, NehariClass::Minus,
                                          quick_options());
    CHECK(r.converged);
    CHECK(r.J_value > 0.0);
    const auto floor =
        delta1_bound(p.S.value, p.data.exps, p.data.crit_exp,
                     lp_norm(p.data.f, dual_exponent(p.data.crit_exp)));
    REQUIRE(floor.has_value());
    CHECK(r.J_value >= *floor);
    const FiberCache cache(r.u, p.data);
    CHECK(std::abs(r.psi_value) <= 1e-8 * cache.scale());
    CHECK(r.u.min_value() >= -1e-12);
}

TEST_CASE("runs are bitwise deterministic for a fixed seed") {
    const Problem p(32);
    SolverOptions o = quick_options();
    o.starts = 3;
    o.budget = 1500;
    const SolveResult a = minimize_branch(p.data, NehariClass::Plus, o);
    const SolveResult b = minimize_branch(p.data, NehariClass::Plus, o);
    CHECK(a.J_value == b.J_value);
    CHECK(a.residual_rel == b.residual_rel);
    CHECK(a.iterations == b.iterations);
    for (int n = 0; n < a.u.size(); ++n) CHECK(a.u[n] == b.u[n]);
}

TEST_CASE("zero source leaves the plus branch unprojectable") {
    const Mesh mesh(1.0, 32);
    ScalarField f(mesh);
    const ProblemData data =
        ProblemData::make(PhiSpec::power(2.0), 4, mesh, f);
    CHECK_THROWS_AS(
        (void)minimize_branch(data, NehariClass::Plus, quick_options()),
        ProjectionError);
    // The minus branch still works (classical f = 0 ground state).
    const SolveResult r = minimize_branch(data, NehariClass::Minus,
                                          quick_options());
    CHECK(r.J_value > 0.0);
}

TEST_CASE("tiny budgets are reported rather than hidden") {
    const Problem p(32);
    SolverOptions o = quick_options();
    o.starts = 2;
    o.budget = 3;
    const SolveResult r = minimize_branch(p.data, NehariClass::Minus, o);
    CHECK_FALSE(r.converged);
    bool saw_exhausted = false;
    for (const StartOutcome& s : r.start_outcomes) {
        if (s.status == StartStatus::BudgetExhausted) saw_exhausted = true;
    }
    CHECK(saw_exhausted);
}

TEST_CASE("history records a monotone energy trace") {
    const Problem p(48);
    const SolveResult r = minimize_branch(p.data, NehariClass::Plus,
                                          quick_options());
    REQUIRE(r.history.size() >= 2);
    for (std::size_t i = 1; i < r.history.size(); ++i) {
        CHECK(r.history[i].J <= r.history[i - 1].J + 1e-12);
    }
}

TEST_CASE("norm monitors accept the plus-branch trace") {
    const Problem p(48);
    const SolveResult r = minimize_branch(p.data, NehariClass::Plus,
                                          quick_options());
    const double f_norm = lp_norm(p.data.f, dual_exponent(p.data.crit_exp));
    const MonitorReport mon =
        monitor_bounds(r.history, r.J_value, p.S.value, f_norm, p.data.exps,
                       p.data.crit_exp);
    CHECK(!mon.entries.empty());
    CHECK(mon.tail_ok);
    CHECK(mon.lower_violations == 0);
    CHECK(mon.upper_violations == 0);

    CHECK_THROWS_AS((void)monitor_bounds(r.history, r.J_value, p.S.value,
                                         0.0, p.data.exps, p.data.crit_exp),
                    DegenerateInputError);
}
