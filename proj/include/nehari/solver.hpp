#pragma once

#include <cstdint>
#include <vector>

#include "nehari/constants.hpp"
#include "nehari/fibering.hpp"
#include "nehari/functional.hpp"

namespace nehari {

enum class StartStatus {
    Converged,
    Stalled,
    ClassFlip,
    BudgetExhausted,
    ProjectionFailed
};

struct SolverOptions {
    int starts = 8;
    int budget = 5000;
    double tol_res = 1e-6;   ///< relative to the start's initial residual
    double tol_step = 1e-10;
    double armijo = 1e-4;
    std::uint64_t seed = 42;
    bool record_history = true;
};

struct IterateRecord {
    int iter = 0;
    double J = 0.0;
    double norm = 0.0;      ///< gradient Luxemburg norm of the iterate
    double psi_value = 0.0;
    double res_rel = 0.0;
    double step = 0.0;
    NehariClass cls = NehariClass::Zero;
};

struct StartOutcome {
    StartStatus status = StartStatus::ProjectionFailed;
    double J_final = 0.0;
    double res_rel = 0.0;
    double res0 = 0.0; ///< reference residual scale of the start
    int iterations = 0;
    int restarts = 0;  ///< fresh directions taken after stalls
};

struct SolveResult {
    ScalarField u;
    NehariClass branch = NehariClass::Plus;
    double J_value = 0.0;
    double psi_value = 0.0;
    double residual_rel = 0.0;
    int iterations = 0;
    int best_start = -1;
    bool converged = false;
    std::vector<StartOutcome> start_outcomes;
    std::vector<int> tied_starts; ///< starts with J within 1e-6 of the best
    std::vector<IterateRecord> history; ///< best start's iterates
};

/// Scale u onto the requested branch: t_root * u for the root of that
/// class. Throws ProjectionError when the profile has no such root.
[[nodiscard]] ScalarField project_to_branch(const ScalarField& u,
                                            const ProblemData& data,
                                            NehariClass branch);

/// Multi-start projected descent along the negative residual with
/// re-projection after every trial step; monotone in J, aborts a start on
/// class flip, restarts from a fresh direction after a 50-iterate stall.
/// Throws ProjectionError when every start fails to project.
[[nodiscard]] SolveResult minimize_branch(const ProblemData& data,
                                          NehariClass branch,
                                          const SolverOptions& opts);

struct MonitorEntry {
    int iter = 0;
    double norm = 0.0;
    double lower_bound = 0.0;
    double upper_bound = 0.0;
    bool lower_ok = true;
    bool upper_ok = true;
};

struct MonitorReport {
    std::vector<MonitorEntry> entries;
    int lower_violations = 0;
    int upper_violations = 0;
    bool tail_ok = true; ///< last quarter of entries all pass
};

/// Norm-bound monitors for a descending (plus-branch) history:
///   lower: ||u_n|| >= (-J_plus) q S^(1/ell) / ((q-1) f_norm)
///   upper: ||u_n|| <  [((q-1)/(q-m)) f_norm S^(-1/ell)]^(1/(alpha-1)),
/// alpha = ell when ||u_n|| >= 1 else m; both with multiplicative slack.
/// Violations are advisory (the constants are discrete surrogates).
[[nodiscard]] MonitorReport monitor_bounds(
    const std::vector<IterateRecord>& history, double J_plus, double S,
    double f_norm, const ExponentData& exps, double q, double slack = 0.05);

} // namespace nehari
