#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "nehari/errors.hpp"
#include "nehari/fibering.hpp"

using namespace nehari;

namespace {

/// Trigonometric solver for t - t^3 = F with 0 < F < 2/(3 sqrt 3):
/// the two positive roots of the depressed cubic t^3 - t + F = 0.
std::pair<double, double> cubic_positive_roots(double F) {
    const double arg = -1.5 * std::sqrt(3.0) * F;
    const double th = std::acos(arg);
    std::vector<double> roots;
    for (int k = 0; k < 3; ++k) {
        roots.push_back(2.0 / std::sqrt(3.0)
                        * std::cos(th / 3.0 - 2.0 * M_PI * k / 3.0));
    }
    std::sort(roots.begin(), roots.end());
    return {roots[1], roots[2]}; // the two positive ones
}

/// Power(2), q = 4 on (0,1): the fibering polynomial is t A - t^3 B. The
/// mesh member owns the geometry, and the dependents are built in place
/// against it so their mesh pointers stay valid.
struct Setup {
    Mesh mesh;
    ScalarField u;    ///< sine mode rescaled so A = B
    ProblemData data; ///< source f = s u tuned to the requested level

    explicit Setup(double fraction_of_peak)
        : mesh(1.0, 64),
          u(scaled_sine(mesh)),
          data(build_data(mesh, u, fraction_of_peak)) {}

private:
    static ScalarField scaled_sine(const Mesh& mesh) {
        ScalarField u0 = ScalarField::from_function(
            mesh, [](double x, double) { return std::sin(M_PI * x); });
        ScalarField fzero(mesh);
        const ProblemData probe =
            ProblemData::make(PhiSpec::power(2.0), 4, mesh, fzero, 4.0);
        const FiberCache cache(u0, probe);
        return u0.scaled(std::sqrt(cache.A() / cache.B()));
    }

    static ProblemData build_data(const Mesh& mesh, const ScalarField& w,
                                  double fraction_of_peak) {
        ScalarField fzero(mesh);
        const ProblemData probe =
            ProblemData::make(PhiSpec::power(2.0), 4, mesh, fzero, 4.0);
        const double c = FiberCache(w, probe).A(); // = B by construction
        // Source f = s w gives F = s * sum V wbar^2 exactly.
        const auto wbar = cell_average(w);
        double wquad = 0.0;
        for (double v : wbar) wquad += mesh.cell_volume() * v * v;
        const double peak_level = 2.0 / (3.0 * std::sqrt(3.0));
        const double s = fraction_of_peak * peak_level * c / wquad;
        return ProblemData::make(PhiSpec::power(2.0), 4, mesh, w.scaled(s),
                                 4.0);
    }
};

} // namespace

TEST_CASE("cache integrals match independent quadrature loops") {
    const Setup s(0.4);
    const FiberCache cache(s.u, s.data);
    const GradientField g = gradient(s.u);
    const auto ubar = cell_average(s.u);
    const auto fbar = cell_average(s.data.f);
    double A = 0.0, B = 0.0, F = 0.0;
    for (int c = 0; c < s.mesh.cell_count(); ++c) {
        const double gm = g.magnitude(c);
        A += s.mesh.cell_volume() * gm * gm;
        B += s.mesh.cell_volume() * std::pow(std::abs(ubar[c]), 4.0);
        F += s.mesh.cell_volume() * fbar[c] * ubar[c];
    }
    CHECK(cache.A() == doctest::Approx(A).epsilon(1e-12));
    CHECK(cache.B() == doctest::Approx(B).epsilon(1e-12));
    CHECK(cache.F() == doctest::Approx(F).epsilon(1e-12));
}

TEST_CASE("gamma is the energy along the ray") {
    const Setup s(0.3);
    const FiberCache cache(s.u, s.data);
    for (double t : {0.05, 0.4, 1.0, 2.7}) {
        CHECK(cache.gamma(t)
              == doctest::Approx(energy(s.u.scaled(t), s.data))
                     .epsilon(1e-11));
        const auto [J, gp] = gamma_eval(s.u, s.data, t);
        CHECK(J == doctest::Approx(cache.gamma(t)).epsilon(1e-12));
        CHECK(gp == doctest::Approx(cache.gamma_prime(t)).epsilon(1e-12));
    }
}

TEST_CASE("m and its derivative agree with finite differences of gamma") {
    const Setup s(0.25);
    const FiberCache cache(s.u, s.data);
    for (double t : {0.2, 0.8, 1.5}) {
        const double eps = 1e-6 * t;
        const double fd_gp = (energy(s.u.scaled(t + eps), s.data)
                              - energy(s.u.scaled(t - eps), s.data))
                             / (2 * eps);
        CHECK(cache.m(t) - cache.F()
              == doctest::Approx(fd_gp).epsilon(1e-6));
        const double fd_mp =
            (cache.m(t + eps) - cache.m(t - eps)) / (2 * eps);
        CHECK(cache.m_prime(t) == doctest::Approx(fd_mp).epsilon(1e-6));
    }
}

TEST_CASE("peak closed form for the quadratic-quartic polynomial") {
    const Setup s(0.2);
    const FiberCache cache(s.u, s.data);
    const auto [t_tilde, m_peak] = find_peak(cache);
    const double oracle_t = std::sqrt(cache.A() / (3.0 * cache.B()));
    CHECK(t_tilde == doctest::Approx(oracle_t).epsilon(1e-10));
    CHECK(m_peak
          == doctest::Approx(oracle_t * cache.A()
                             - std::pow(oracle_t, 3.0) * cache.B())
                 .epsilon(1e-10));

    // alpha = ell reproduces the same closed form for a pure power.
    const auto [t_bar, g_peak] = g_alpha_peak(s.u, s.data, 2.0);
    CHECK(t_bar == doctest::Approx(oracle_t).epsilon(1e-10));
    CHECK(g_peak == doctest::Approx(m_peak).epsilon(1e-10));
}

TEST_CASE("roots match the trigonometric cubic solver") {
    for (double fraction : {0.1 / (2.0 / (3.0 * std::sqrt(3.0))),
                            0.2 / (2.0 / (3.0 * std::sqrt(3.0))),
                            0.3 / (2.0 / (3.0 * std::sqrt(3.0)))}) {
        const Setup s(fraction);
        const FiberingProfile prof = nehari_roots(s.u, s.data);
        REQUIRE(prof.roots.size() == 2);
        const double Fhat = prof.F / prof.A; // A = B by construction
        const auto [r1, r2] = cubic_positive_roots(Fhat);
        CHECK(std::abs(prof.roots[0] - r1) <= 1e-8);
        CHECK(std::abs(prof.roots[1] - r2) <= 1e-8);
        CHECK(prof.classes[0] == NehariClass::Plus);
        CHECK(prof.classes[1] == NehariClass::Minus);
        CHECK(prof.t_tilde == doctest::Approx(1.0 / std::sqrt(3.0))
                                  .epsilon(1e-8));
        CHECK_FALSE(prof.threshold_violated);
    }
}

TEST_CASE("zero source level leaves the single descending root") {
    const Setup s(0.0);
    const FiberingProfile prof = nehari_roots(s.u, s.data);
    REQUIRE(prof.roots.size() == 1);
    CHECK(prof.roots[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(prof.classes[0] == NehariClass::Minus);
}

TEST_CASE("super-peak source level is flagged with no roots") {
    const Setup s(1.3);
    const FiberingProfile prof = nehari_roots(s.u, s.data);
    CHECK(prof.threshold_violated);
    CHECK(prof.roots.empty());
}

TEST_CASE("near-tangent levels are marked") {
    const Setup s(1.0 + 1e-9);
    const FiberingProfile prof = nehari_roots(s.u, s.data);
    CHECK(prof.tangency);
}

TEST_CASE("classification of projected points") {
    const Setup s(0.35);
    const FiberingProfile prof = nehari_roots(s.u, s.data);
    REQUIRE(prof.roots.size() == 2);
    CHECK(classify(s.u.scaled(prof.roots[0]), s.data) == NehariClass::Plus);
    CHECK(classify(s.u.scaled(prof.roots[1]), s.data) == NehariClass::Minus);
    CHECK_THROWS_AS((void)classify(s.u.scaled(10.0), s.data),
                    ProjectionError);
}

TEST_CASE("ray scan brackets the requested window") {
    const Setup s(0.3);
    const auto samples = scan(s.u, s.data, 1e-2, 1e2, 41);
    REQUIRE(samples.size() == 41);
    CHECK(samples.front().t == doctest::Approx(1e-2));
    CHECK(samples.back().t == doctest::Approx(1e2));
    // Midpoint of the log grid.
    CHECK(samples[20].t == doctest::Approx(1.0).epsilon(1e-12));
    for (const FiberSample& smp : samples) {
        CHECK(smp.gamma
              == doctest::Approx(energy(s.u.scaled(smp.t), s.data))
                     .epsilon(1e-10));
    }
}

TEST_CASE("zero directions are rejected") {
    const Mesh mesh(1.0, 16);
    ScalarField z(mesh);
    ScalarField f(mesh);
    const ProblemData data =
        ProblemData::make(PhiSpec::power(2.0), 4, mesh, f, 4.0);
    CHECK_THROWS_AS((void)FiberCache(z, data), DegenerateInputError);
}
