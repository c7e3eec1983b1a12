#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "nehari/functional.hpp"

namespace nehari {

/// Outcome of the embedding-constant descent.
struct SEstimate {
    double value = 0.0;        ///< best quotient over all starts
    double spread = 0.0;       ///< max - min across converged starts
    std::vector<double> per_start;
    int iterations_total = 0;
    bool converged = true;     ///< every start met the descent tolerance
};

/// Both branches of the source-size threshold.
struct ThresholdSet {
    double branch_ell = 0.0;
    double branch_m = 0.0;
    double lambda1 = 0.0; ///< min of the branches
    double lambda2 = 0.0; ///< lambda1 / m
    double Lambda1 = 0.0;
    double Lambda2 = 0.0;
    double Lambda = 0.0;
};

/// Per-direction record of the peak-dominates-source sweep.
struct SweepRecord {
    int case_id = 0;        ///< 1, 2, 3: both t_bar >= 1 / mixed / both <= 1
    double t_bar_ell = 0.0;
    double t_bar_m = 0.0;
    double m_peak = 0.0;
    double fu = 0.0;        ///< integral f u for the normalized direction
    bool dominated = true;  ///< m_peak >= fu
    bool zero_class = false; ///< some projection fell in the dead band
};

struct ConstantsReport {
    SEstimate S;
    ThresholdSet thresholds;
    double f_norm = 0.0;    ///< dual Lebesgue norm of the source
    bool f1_ok = false;     ///< f_norm <= lambda1
    bool f2_ok = false;     ///< f_norm <= Lambda1
    bool f2_prime_ok = false; ///< f_norm <= Lambda2
    std::optional<double> delta1; ///< set when positive (f_norm < lambda2)
    std::array<int, 3> case_counts{0, 0, 0};
    int violations = 0;     ///< directions with m_peak < fu
    int zero_class_hits = 0;
    int directions = 0;
    std::vector<SweepRecord> sweep;
};

/// Best constant of the discrete embedding: minimizes
/// ||grad u||_Phi^ell / ||u||_q^ell by normalized projected descent with
/// Barzilai-Borwein steps from `starts` seeded directions (the first start
/// is the lowest sine mode).
[[nodiscard]] SEstimate estimate_S(const ProblemData& data, std::uint64_t seed,
                                   int starts = 8);

/// Evaluates both alpha branches of the threshold
///   S^(alpha(q-1)/(ell(q-alpha))) [ell(ell-1)/(q-1)]^((alpha-1)/(q-alpha))
///   [ell(q-m)/(q-1)],  alpha in {ell, m},
/// plus the derived lambda2 / Lambda ladder.
[[nodiscard]] ThresholdSet thresholds_from(double S, const ExponentData& exps,
                                           double q);

/// Energy floor on the descending branch:
///   min over alpha of K_alpha [A_alpha - f_norm B], with
///   K_alpha = [ell(ell-1) S^(q/ell) / (q-1)]^(1/(q-alpha)),
///   A_alpha = ell (1/m - 1/q) K_alpha^(alpha-1),
///   B = (1 - 1/q) S^(-1/ell).
/// Unset when the bound is not positive.
[[nodiscard]] std::optional<double> delta1_bound(double S,
                                                 const ExponentData& exps,
                                                 double q, double f_norm);

/// Exact rescale of a nonnegative shape so its dual Lebesgue norm (exponent
/// q' = q/(q-1)) equals fraction * Lambda.
[[nodiscard]] ScalarField auto_scale_f(const ScalarField& shape,
                                       double fraction, double Lambda,
                                       double q);

/// Full report: S descent, threshold ladder, source-condition booleans,
/// delta1 and the per-direction peak sweep (fundamental mode first, then
/// `directions - 1` sampled ones, all normalized in L^q).
[[nodiscard]] ConstantsReport compute_constants(const ProblemData& data,
                                                std::uint64_t seed,
                                                int starts = 8,
                                                int directions = 100);

/// Same report built around a precomputed S estimate (lets callers scale
/// the source off the threshold ladder without running the descent twice).
[[nodiscard]] ConstantsReport finish_constants(const ProblemData& data,
                                               SEstimate S, std::uint64_t seed,
                                               int directions);

/// Dual Lebesgue exponent q' = q / (q - 1).
[[nodiscard]] double dual_exponent(double q);

} // namespace nehari
