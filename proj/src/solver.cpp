#include "nehari/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nehari/errors.hpp"
#include "nehari/sampling.hpp"

namespace nehari {

ScalarField project_to_branch(const ScalarField& u, const ProblemData& data,
                              NehariClass branch) {
    if (branch == NehariClass::Zero) {
        throw ProjectionError("projection targets the plus or minus branch");
    }
    const FiberingProfile prof = nehari_roots(u, data);
    for (std::size_t i = 0; i < prof.roots.size(); ++i) {
        if (prof.classes[i] == branch) {
            return u.scaled(prof.roots[i]);
        }
    }
    if (prof.threshold_violated) {
        throw ProjectionError(
            "projection unavailable: source level exceeds the fiber peak");
    }
    throw ProjectionError("projection unavailable: no root on the requested "
                          "branch along this ray");
}

namespace {

struct DescentState {
    ScalarField u;
    FunctionalEval eval;
    double res0 = 0.0; ///< reference residual scale for this direction
};

[[nodiscard]] double nodal_norm2(const DualVector& r) {
    double s = 0.0;
    for (const double v : r.values) s += v * v;
    return s;
}

/// One start of the projected descent. Mutates the sampler on stall
/// restarts (fresh directions come from the shared stream).
StartOutcome run_start(const ProblemData& data, NehariClass branch,
                       const SolverOptions& opts, DirectionSampler& sampler,
                       ScalarField direction, ScalarField& out_u,
                       std::vector<IterateRecord>* history) {
    StartOutcome outcome;
    DescentState st{project_to_branch(direction, data, branch),
                    {},
                    0.0};
    st.eval = evaluate_all(st.u, data);
    st.res0 = dual_norm(st.eval.res, data.spec);
    if (st.res0 <= 0.0) st.res0 = std::numeric_limits<double>::min();

    std::vector<double> prev_u, prev_r;
    double step = 0.0;
    double last_step = 0.0;
    int stall_streak = 0;
    const int max_restarts = 3;

    const auto record = [&](int it, double rel) {
        if (history == nullptr) return;
        history->push_back({it, st.eval.J, sobolev_norm(st.u, data.spec),
                            st.eval.psi_value, rel, last_step, branch});
    };

    const auto finish = [&](StartStatus status, double rel) {
        outcome.status = status;
        outcome.J_final = st.eval.J;
        outcome.res_rel = rel;
        outcome.res0 = st.res0;
        out_u = st.u;
        return outcome;
    };

    for (int it = 0; it < opts.budget; ++it) {
        ++outcome.iterations;
        const double rel = dual_norm(st.eval.res, data.spec) / st.res0;
        record(it, rel);
        if (rel <= opts.tol_res) {
            return finish(StartStatus::Converged, rel);
        }

        // Step length: Barzilai-Borwein from the last accepted move, else
        // an amplitude heuristic on the first pass.
        const double g2 = nodal_norm2(st.eval.res);
        if (!prev_u.empty()) {
            double num = 0.0, den = 0.0;
            for (std::size_t n = 0; n < prev_u.size(); ++n) {
                const double du = st.u[static_cast<int>(n)] - prev_u[n];
                const double dg = st.eval.res.values[n] - prev_r[n];
                num += du * du;
                den += du * dg;
            }
            if (den > 0.0) step = std::clamp(num / den, 1e-14, 1e6);
        }
        if (!(step > 0.0)) {
            double rmax = 0.0;
            for (const double v : st.eval.res.values) {
                rmax = std::max(rmax, std::abs(v));
            }
            step = rmax > 0.0 ? 0.1 * std::max(st.u.max_abs(), 1.0) / rmax
                              : 1.0;
        }

        prev_u.assign(st.u.values().begin(), st.u.values().end());
        prev_r = st.eval.res.values;
        const double J_before = st.eval.J;

        bool accepted = false;
        bool projection_lost = false;
        double s = step;
        for (int back = 0; back < 60; ++back) {
            ScalarField trial = st.u;
            for (int n = 0; n < trial.size(); ++n) {
                trial[n] -= s * st.eval.res.values[static_cast<std::size_t>(n)];
            }
            trial.enforce_zero_boundary();
            try {
                ScalarField projected = project_to_branch(trial, data, branch);
                projection_lost = false;
                const FunctionalEval trial_eval = evaluate_all(projected, data);
                if (trial_eval.J <= st.eval.J - opts.armijo * s * g2) {
                    st.u = std::move(projected);
                    st.eval = trial_eval;
                    last_step = s;
                    accepted = true;
                    break;
                }
            } catch (const ProjectionError&) {
                projection_lost = true;
            }
            s *= 0.5;
        }

        if (!accepted && projection_lost) {
            // The branch root disappeared arbitrarily close to the current
            // point: the ray crossed near the degenerate set.
            return finish(StartStatus::ClassFlip,
                          dual_norm(st.eval.res, data.spec) / st.res0);
        }

        // Displacement-based stall: the iterate cannot move at this scale.
        bool force_stall = false;
        if (accepted) {
            double move = 0.0;
            for (std::size_t n = 0; n < prev_u.size(); ++n) {
                move = std::max(move,
                                std::abs(st.u[static_cast<int>(n)] - prev_u[n]));
            }
            force_stall = move <= opts.tol_step * std::max(1.0, st.u.max_abs());
        }

        const bool flat =
            !accepted ||
            std::abs(J_before - st.eval.J) <= 1e-12 * std::abs(st.eval.J);
        if (!accepted) stall_streak = std::max(stall_streak, 49);
        stall_streak = flat ? stall_streak + 1 : 0;
        if (force_stall) stall_streak = std::max(stall_streak, 50);

        if (stall_streak >= 50) {
            const double rel_now = dual_norm(st.eval.res, data.spec) / st.res0;
            if (rel_now <= opts.tol_res) {
                return finish(StartStatus::Converged, rel_now);
            }
            if (outcome.restarts >= max_restarts) {
                return finish(StartStatus::Stalled, rel_now);
            }
            // Fresh direction, same start budget.
            ++outcome.restarts;
            stall_streak = 0;
            prev_u.clear();
            prev_r.clear();
            step = 0.0;
            last_step = 0.0;
            for (int tries = 0; tries < 8; ++tries) {
                try {
                    ScalarField fresh =
                        project_to_branch(sampler.next(), data, branch);
                    const FunctionalEval fe = evaluate_all(fresh, data);
                    if (fe.J < st.eval.J) { // keep the overall run monotone
                        st.u = std::move(fresh);
                        st.eval = fe;
                        st.res0 = dual_norm(st.eval.res, data.spec);
                        if (st.res0 <= 0.0) {
                            st.res0 = std::numeric_limits<double>::min();
                        }
                    }
                    break;
                } catch (const ProjectionError&) {
                }
            }
        }
    }
    return finish(StartStatus::BudgetExhausted,
                  dual_norm(st.eval.res, data.spec) / st.res0);
}

} // namespace

SolveResult minimize_branch(const ProblemData& data, NehariClass branch,
                            const SolverOptions& opts) {
    if (branch == NehariClass::Zero) {
        throw ProjectionError("minimization targets the plus or minus branch");
    }
    DirectionSampler sampler(*data.mesh, opts.seed,
                             branch == NehariClass::Plus ? "solve-plus"
                                                         : "solve-minus");
    SolveResult result{ScalarField(*data.mesh), branch, 0.0, 0.0, 0.0, 0,
                       -1,    false,            {},     {},  {}};
    result.start_outcomes.reserve(static_cast<std::size_t>(opts.starts));

    double bestJ = std::numeric_limits<double>::infinity();
    ScalarField best_u(*data.mesh);
    std::vector<IterateRecord> best_history;
    int projection_failures = 0;

    for (int s = 0; s < opts.starts; ++s) {
        ScalarField dir = s == 0 ? sampler.fundamental() : sampler.next();
        ScalarField final_u(*data.mesh);
        std::vector<IterateRecord> history;
        StartOutcome outcome;
        try {
            outcome = run_start(data, branch, opts, sampler, std::move(dir),
                                final_u,
                                opts.record_history ? &history : nullptr);
        } catch (const ProjectionError&) {
            ++projection_failures;
            outcome = StartOutcome{};
            result.start_outcomes.push_back(outcome);
            continue;
        }
        result.start_outcomes.push_back(outcome);
        const bool usable = outcome.status != StartStatus::ProjectionFailed;
        if (usable && outcome.J_final < bestJ) {
            bestJ = outcome.J_final;
            best_u = final_u;
            best_history = std::move(history);
            result.best_start = s;
        }
    }
    if (result.best_start < 0) {
        throw ProjectionError(
            "no start admitted a projection onto the requested branch (" +
            std::to_string(projection_failures) + " of " +
            std::to_string(opts.starts) + " failed)");
    }

    // Nonnegative re-projection: with a nonnegative source, |u| projected
    // back to the branch never increases the branch energy.
    if (data.f.min_value() >= 0.0) {
        try {
            ScalarField abs_proj = project_to_branch(best_u.abs(), data, branch);
            if (energy(abs_proj, data) <= bestJ + 1e-12 * std::abs(bestJ)) {
                best_u = std::move(abs_proj);
            }
        } catch (const ProjectionError&) {
            // keep the signed minimizer
        }
    }

    const FunctionalEval fin = evaluate_all(best_u, data);
    result.u = std::move(best_u);
    result.J_value = fin.J;
    result.psi_value = fin.psi_value;
    const StartOutcome& bo =
        result.start_outcomes[static_cast<std::size_t>(result.best_start)];
    result.residual_rel = bo.res0 > 0.0
                              ? dual_norm(fin.res, data.spec) / bo.res0
                              : bo.res_rel;
    result.iterations = bo.iterations;
    result.converged = bo.status == StartStatus::Converged;
    result.history = std::move(best_history);
    for (std::size_t s = 0; s < result.start_outcomes.size(); ++s) {
        const StartOutcome& o = result.start_outcomes[s];
        if (o.status == StartStatus::ProjectionFailed) continue;
        if (std::abs(o.J_final - bestJ) <=
            1e-6 * std::max(1.0, std::abs(bestJ))) {
            result.tied_starts.push_back(static_cast<int>(s));
        }
    }
    return result;
}

MonitorReport monitor_bounds(const std::vector<IterateRecord>& history,
                             double J_plus, double S, double f_norm,
                             const ExponentData& exps, double q,
                             double slack) {
    if (!(f_norm > 0.0)) {
        throw DegenerateInputError("norm monitors need a nonzero source");
    }
    if (!(S > 0.0)) {
        throw DegenerateInputError("norm monitors need S > 0");
    }
    MonitorReport rep;
    const double ell = exps.ell, m = exps.m;
    const double lower =
        (-J_plus) * q * std::pow(S, 1.0 / ell) / ((q - 1.0) * f_norm);
    rep.entries.reserve(history.size());
    for (const IterateRecord& h : history) {
        MonitorEntry e;
        e.iter = h.iter;
        e.norm = h.norm;
        e.lower_bound = lower;
        const double alpha = h.norm >= 1.0 ? ell : m;
        e.upper_bound = std::pow((q - 1.0) / (q - m) * f_norm *
                                     std::pow(S, -1.0 / ell),
                                 1.0 / (alpha - 1.0));
        e.lower_ok = h.norm >= lower * (1.0 - slack);
        e.upper_ok = h.norm < e.upper_bound * (1.0 + slack);
        if (!e.lower_ok) ++rep.lower_violations;
        if (!e.upper_ok) ++rep.upper_violations;
        rep.entries.push_back(e);
    }
    const std::size_t n = rep.entries.size();
    const std::size_t tail_begin = n - n / 4;
    for (std::size_t i = tail_begin; i < n; ++i) {
        if (!rep.entries[i].lower_ok || !rep.entries[i].upper_ok) {
            rep.tail_ok = false;
        }
    }
    return rep;
}

} // namespace nehari
