#pragma once

#include <vector>

#include "nehari/functional.hpp"

namespace nehari {

enum class NehariClass { Plus, Minus, Zero };

/// Per-direction scalars cached for fast sweeps along the ray t -> t*u:
/// cell gradient magnitudes plus the three direction integrals.
class FiberCache {
public:
    FiberCache(const ScalarField& u, const ProblemData& data);

    [[nodiscard]] double A() const noexcept { return A_; }
    [[nodiscard]] double B() const noexcept { return B_; }
    [[nodiscard]] double F() const noexcept { return F_; }
    [[nodiscard]] double scale() const noexcept {
        return std::abs(A_) + std::abs(B_) + std::abs(F_);
    }
    [[nodiscard]] double crit_exp() const noexcept { return q_; }

    /// m_u(t) = t integral phi(t|grad u|)|grad u|^2 - t^(q-1) B.
    [[nodiscard]] double m(double t) const;
    /// Analytic derivative of m_u.
    [[nodiscard]] double m_prime(double t) const;
    /// gamma_u(t) = J(t u); gamma_u'(t) = m_u(t) - F.
    [[nodiscard]] double gamma(double t) const;
    [[nodiscard]] double gamma_prime(double t) const { return m(t) - F_; }

private:
    const PhiSpec* spec_;
    double q_;
    double vol_;
    std::vector<double> g_; // |grad u| per cell
    double A_ = 0.0, B_ = 0.0, F_ = 0.0;
};

struct FiberSample {
    double t, gamma, gamma_prime, m;
};

/// Everything the ray analysis produces for one direction.
struct FiberingProfile {
    double A = 0.0, B = 0.0, F = 0.0;
    double t_tilde = 0.0; ///< argmax of m_u
    double m_peak = 0.0;
    std::vector<double> roots;            ///< ascending, 0 to 2 entries
    std::vector<NehariClass> classes;     ///< per root
    bool threshold_violated = false;      ///< F >= m_peak: no roots
    bool tangency = false;                ///< F within 1e-7*scale of m_peak
    std::vector<FiberSample> samples;     ///< filled by scan requests only
    [[nodiscard]] double scale() const {
        return std::abs(A) + std::abs(B) + std::abs(F);
    }
};

/// (J(t u), gamma_u'(t)).
[[nodiscard]] std::pair<double, double> gamma_eval(const ScalarField& u,
                                                   const ProblemData& data,
                                                   double t);

[[nodiscard]] double m_map(const ScalarField& u, const ProblemData& data,
                           double t);

/// Unique maximizer of m_u: bracketed by sign change of the analytic m_u'
/// on an expanding grid, refined by bisection. Returns (t_tilde, m_peak).
[[nodiscard]] std::pair<double, double> find_peak(const FiberCache& cache);
[[nodiscard]] std::pair<double, double> find_peak(const ScalarField& u,
                                                  const ProblemData& data);

/// Closed-form peak of g_alpha(t) = t^(alpha-1) A - t^(q-1) B:
/// t_bar = [(alpha-1) A / ((q-1) B)]^(1/(q-alpha)). Returns (t_bar,
/// g_alpha(t_bar)).
[[nodiscard]] std::pair<double, double> g_alpha_peak(const ScalarField& u,
                                                     const ProblemData& data,
                                                     double alpha);

/// Root analysis of gamma_u' = 0, i.e. m_u(t) = F, per the three source
/// cases (F <= 0: one root beyond the peak; 0 < F < m_peak: one on each
/// side; F >= m_peak: none, flagged).
[[nodiscard]] FiberingProfile nehari_roots(const ScalarField& u,
                                           const ProblemData& data);
[[nodiscard]] FiberingProfile nehari_roots(const FiberCache& cache);

/// Classify a field already on the manifold (|psi(u)| <= tol*scale, else
/// ProjectionError) by the sign of <psi'(u), u> with a dead band of
/// 1e-6*|A| for the degenerate class.
[[nodiscard]] NehariClass classify(const ScalarField& u,
                                   const ProblemData& data,
                                   double membership_tol = 1e-8);

/// Log-spaced ray samples for reporting.
[[nodiscard]] std::vector<FiberSample> scan(const ScalarField& u,
                                            const ProblemData& data,
                                            double t_lo, double t_hi,
                                            int points);

} // namespace nehari
