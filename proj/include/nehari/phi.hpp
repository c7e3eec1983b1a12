#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace nehari {

/// Generator families for the N-function Phi(t) = integral_0^t s*phi(s) ds.
///
/// Power:       phi(t) = t^(p-2)              (so Phi(t) = t^p / p)
/// DoublePower: phi(t) = t^(p-2) + t^(q-2)    (p < q)
/// Tabulated:   monotone cubic interpolant of (t, phi) samples in log-log
///              coordinates, power-law tails beyond the table.
enum class PhiFamily { Power, DoublePower, Tabulated };

/// Logarithmic sampling window used for exponent extraction and the
/// finite-grid hypothesis surrogates.
struct SamplingWindow {
    double t_min = 1e-6;
    double t_max = 1e6;
    int points = 4096;
};

/// A concrete generator phi together with its first two derivatives.
/// Construction validates basic sanity only (positive samples, ordered
/// knots); the analytic hypotheses are checked by check_hypotheses so that
/// deliberately invalid generators remain constructible for diagnostics.
class PhiSpec {
public:
    static PhiSpec power(double p, SamplingWindow window = {});
    static PhiSpec double_power(double p, double q, SamplingWindow window = {});
    static PhiSpec tabulated(std::span<const double> t,
                             std::span<const double> phi_values,
                             SamplingWindow window = {});

    [[nodiscard]] double phi(double t) const;
    [[nodiscard]] double phi_prime(double t) const;
    [[nodiscard]] double phi_second(double t) const;

    /// t*phi(t), extended by its limit 0 at t = 0.
    [[nodiscard]] double t_phi(double t) const;
    /// d/dt [t*phi(t)] = phi + t*phi'.
    [[nodiscard]] double t_phi_prime(double t) const;

    /// Phi(t); closed forms for the built-in families, adaptive Simpson
    /// (abs tol 1e-10) for tabulated generators.
    [[nodiscard]] double big_phi(double t) const;

    /// Inverse of Phi by monotone bisection (closed form for Power).
    [[nodiscard]] double big_phi_inverse(double s) const;

    [[nodiscard]] PhiFamily family() const noexcept { return family_; }
    [[nodiscard]] const SamplingWindow& window() const noexcept { return window_; }
    [[nodiscard]] double param_p() const noexcept { return p_; }
    [[nodiscard]] double param_q() const noexcept { return q_; }

    /// Ratio r(t) = t*(t phi)'' / (t phi)' whose inf/sup over (0,inf) are
    /// ell-2 and m-2. Uses the analytic derivatives.
    [[nodiscard]] double homogeneity_ratio(double t) const;

    [[nodiscard]] std::uint64_t hash() const;

private:
    PhiSpec() = default;

    PhiFamily family_ = PhiFamily::Power;
    double p_ = 2.0;
    double q_ = 0.0;
    SamplingWindow window_{};

    // Tabulated representation: PCHIP of w = ln phi against xi = ln t.
    std::vector<double> xi_;     // knot abscissae (ln t), strictly increasing
    std::vector<double> w_;      // knot values (ln phi)
    std::vector<double> slope_;  // monotone-limited knot slopes dw/dxi

    // Piecewise-cubic evaluation of w, w', w'' at xi.
    void eval_loglog(double xi, double& w, double& dw, double& d2w) const;
};

/// Growth exponents and derived critical exponents.
struct ExponentData {
    double ell = 0.0;       ///< inf of r(t) + 2
    double m = 0.0;         ///< sup of r(t) + 2
    int space_dim = 0;      ///< analytic dimension N
    double ell_star = 0.0;  ///< ell*N/(N-ell)
    double m_star = 0.0;    ///< m*N/(N-m)
    double h_product = 0.0; ///< ell*(ell*-m)/(ell*-ell), the (H) lower member
    bool h_ok = false;      ///< 1 < h_product <= ell <= m < ell*
};

/// Raw grid measurement (never throws): inf/sup of the homogeneity ratio on
/// the sampling window, plus the t*phi values used by the limit surrogates.
struct ExponentMeasurement {
    double ratio_inf = 0.0;
    double ratio_sup = 0.0;
    double ell = 0.0; ///< ratio_inf + 2 (closed form for built-in families)
    double m = 0.0;   ///< ratio_sup + 2
    double tphi_at_min = 0.0;
    double tphi_at_one = 0.0;
    double tphi_at_max = 0.0;
    bool tphi_strictly_increasing = true;
};

[[nodiscard]] ExponentMeasurement measure_exponents(const PhiSpec& spec);

/// Closed-form exponents for the built-in families, grid measurement for
/// tabulated ones. Throws HypothesisError naming the violated inequality
/// when ell <= 1 or m >= N.
[[nodiscard]] ExponentData extract_exponents(const PhiSpec& spec, int space_dim);

/// Legendre conjugate Phi~(t) = max_{s>=0} (t*s - Phi(s)), computed by
/// bisection on the strictly increasing s*phi(s) to 1e-12. Throws
/// NumericError when t falls outside the range of s*phi(s) on the window.
[[nodiscard]] double conjugate_phi(const PhiSpec& spec, double t);

/// The Sobolev conjugate Phi_*: (Phi_*)^{-1}(t) = integral_0^t
/// Phi^{-1}(s) / s^((N+1)/N) ds, inverted monotonically. Values are served
/// from a dense log-log table built once per (spec, N); tails extrapolate
/// as the exact asymptotic power laws.
class SobolevConjugate {
public:
    SobolevConjugate(const PhiSpec& spec, int space_dim);

    /// Phi_*(t) (0 at 0).
    [[nodiscard]] double value(double t) const;

    /// Phi_*'(t) via the inverse-function rule: y^((N+1)/N) / Phi^{-1}(y)
    /// with y = Phi_*(t).
    [[nodiscard]] double derivative(double t) const;

    /// G(t) = (Phi_*)^{-1}(t), exposed for oracle cross-checks.
    [[nodiscard]] double inverse_value(double t) const;

    [[nodiscard]] int space_dim() const noexcept { return dim_; }

private:
    int dim_;
    bool power_closed_form_ = false;
    double power_p_ = 0.0;
    double power_pstar_ = 0.0;
    double power_coeff_ = 0.0; // G(t) = power_coeff_ * t^(1/p*)

    std::shared_ptr<const PhiSpec> spec_;
    // log-log table of G: lg_[k] = ln G(exp(ly_[k])).
    std::vector<double> ly_, lg_;

    [[nodiscard]] double g_of_y(double ln_y) const;     // ln G at ln y
    [[nodiscard]] double y_of_g(double ln_g) const;     // inverse lookup
};

/// Boolean report of the structural hypotheses; never throws.
struct HypothesisReport {
    bool phi1_ok = false;       ///< finite-grid surrogate of the 0/inf limits
    bool phi2_ok = false;       ///< t*phi(t) strictly increasing on the grid
    bool phi3_ok = false;       ///< 1 < ell and m < N
    bool h_ok = false;          ///< the combined inequality chain (H)
    bool psi_convex_ok = false; ///< t -> Phi(t) - phi(t) t^2 / ell* convex
    ExponentMeasurement measured;
    ExponentData exponents;     ///< valid only when phi3_ok
    [[nodiscard]] bool all_ok() const noexcept {
        return phi1_ok && phi2_ok && phi3_ok && h_ok && psi_convex_ok;
    }
};

[[nodiscard]] HypothesisReport check_hypotheses(const PhiSpec& spec,
                                                int space_dim);

/// min(t^a, t^b) and max(t^a, t^b): the scaling factors appearing in the
/// sandwich inequalities for Phi (a = ell, b = m) and phi (a = ell-2,
/// b = m-2) and the critical variants.
[[nodiscard]] double min_power(double t, double a, double b);
[[nodiscard]] double max_power(double t, double a, double b);

} // namespace nehari
