#include "nehari/fibering.hpp"

#include <algorithm>
#include <cmath>

#include "nehari/errors.hpp"

namespace nehari {

namespace {

[[nodiscard]] double abs_pow(double t, double e) {
    return std::pow(std::abs(t), e);
}

} // namespace

FiberCache::FiberCache(const ScalarField& u, const ProblemData& data)
    : spec_(&data.spec), q_(data.crit_exp), vol_(data.mesh->cell_volume()) {
    if (!u.mesh().same_as(*data.mesh)) {
        throw DimensionError("fiber cache: field mesh does not match problem mesh");
    }
    const GradientField grad = gradient(u);
    const std::vector<double> au = cell_average(u);
    const std::vector<double> af = cell_average(data.f);
    const int nc = data.mesh->cell_count();
    g_.resize(static_cast<std::size_t>(nc));
    for (int c = 0; c < nc; ++c) {
        const double g = grad.magnitude(c);
        g_[static_cast<std::size_t>(c)] = g;
        if (g > 0.0) {
            A_ += vol_ * spec_->t_phi(g) * g;
        }
        B_ += vol_ * abs_pow(au[static_cast<std::size_t>(c)], q_);
        F_ += vol_ * af[static_cast<std::size_t>(c)] *
              au[static_cast<std::size_t>(c)];
    }
    if (!(std::isfinite(A_) && std::isfinite(B_) && std::isfinite(F_))) {
        throw NumericError("fiber cache: non-finite direction integrals");
    }
    if (A_ <= 0.0 && B_ <= 0.0) {
        throw DegenerateInputError("fiber analysis requires a nonzero direction");
    }
}

double FiberCache::m(double t) const {
    if (!(t > 0.0)) {
        throw DegenerateInputError("fiber map is defined for t > 0");
    }
    double grad_part = 0.0;
    for (const double g : g_) {
        if (g > 0.0) {
            grad_part += spec_->t_phi(t * g) * g;
        }
    }
    return vol_ * grad_part - std::pow(t, q_ - 1.0) * B_;
}

double FiberCache::m_prime(double t) const {
    if (!(t > 0.0)) {
        throw DegenerateInputError("fiber map is defined for t > 0");
    }
    double grad_part = 0.0;
    for (const double g : g_) {
        if (g > 0.0) {
            grad_part += spec_->t_phi_prime(t * g) * g * g;
        }
    }
    return vol_ * grad_part - (q_ - 1.0) * std::pow(t, q_ - 2.0) * B_;
}

double FiberCache::gamma(double t) const {
    if (!(t > 0.0)) {
        throw DegenerateInputError("fiber map is defined for t > 0");
    }
    double phi_part = 0.0;
    for (const double g : g_) {
        if (g > 0.0) {
            phi_part += spec_->big_phi(t * g);
        }
    }
    return vol_ * phi_part - std::pow(t, q_) / q_ * B_ - t * F_;
}

std::pair<double, double> gamma_eval(const ScalarField& u,
                                     const ProblemData& data, double t) {
    const FiberCache cache(u, data);
    return {cache.gamma(t), cache.gamma_prime(t)};
}

double m_map(const ScalarField& u, const ProblemData& data, double t) {
    return FiberCache(u, data).m(t);
}

std::pair<double, double> find_peak(const FiberCache& cache) {
    if (cache.A() <= 0.0) {
        throw DegenerateInputError("fiber peak: direction has zero gradient energy");
    }
    if (cache.B() <= 0.0) {
        throw DegenerateInputError(
            "fiber peak: direction has zero reaction integral, map is monotone");
    }
    // m' > 0 for small t and m' < 0 for large t; expand geometrically from
    // t = 1 until the sign change is bracketed.
    double lo = 1.0, hi = 1.0;
    if (cache.m_prime(1.0) > 0.0) {
        for (int k = 0;; ++k) {
            if (k >= 80) {
                throw NumericError("fiber peak: no sign change up to t = 1e24");
            }
            hi = lo * 2.0;
            if (cache.m_prime(hi) <= 0.0) break;
            lo = hi;
        }
    } else {
        for (int k = 0;; ++k) {
            if (k >= 80) {
                throw NumericError("fiber peak: no sign change down to t = 1e-24");
            }
            lo = hi * 0.5;
            if (cache.m_prime(lo) > 0.0) break;
            hi = lo;
        }
    }
    for (int it = 0; it < 200 && (hi - lo) > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (cache.m_prime(mid) > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double t_tilde = 0.5 * (lo + hi);
    return {t_tilde, cache.m(t_tilde)};
}

std::pair<double, double> find_peak(const ScalarField& u,
                                    const ProblemData& data) {
    return find_peak(FiberCache(u, data));
}

std::pair<double, double> g_alpha_peak(const ScalarField& u,
                                       const ProblemData& data, double alpha) {
    const FiberCache cache(u, data);
    const double q = data.crit_exp;
    if (cache.B() <= 0.0) {
        throw DegenerateInputError("comparison peak: zero reaction integral");
    }
    if (!(alpha > 1.0 && alpha < q)) {
        throw DegenerateInputError("comparison peak requires 1 < alpha < q");
    }
    const double t_bar = std::pow((alpha - 1.0) * cache.A() /
                                      ((q - 1.0) * cache.B()),
                                  1.0 / (q - alpha));
    const double g_val = std::pow(t_bar, alpha - 1.0) * cache.A() -
                         std::pow(t_bar, q - 1.0) * cache.B();
    return {t_bar, g_val};
}

namespace {

/// Bisect m(t) = F on [lo, hi] where m - F changes sign between the ends.
[[nodiscard]] double bisect_m(const FiberCache& cache, double F, double lo,
                              double hi, bool increasing) {
    for (int it = 0; it < 200 && (hi - lo) > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double v = cache.m(mid) - F;
        const bool go_right = increasing ? (v < 0.0) : (v > 0.0);
        if (go_right) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

/// Gradient energy of the scaled field: A(t u) = t (m(t) + t^(q-1) B).
[[nodiscard]] double scaled_gradient_energy(const FiberCache& cache, double t,
                                            double q) {
    return t * (cache.m(t) + std::pow(t, q - 1.0) * cache.B());
}

} // namespace

FiberingProfile nehari_roots(const FiberCache& cache) {
    FiberingProfile out;
    out.A = cache.A();
    out.B = cache.B();
    out.F = cache.F();
    if (cache.B() <= 0.0) {
        throw DegenerateInputError("root analysis: zero reaction integral");
    }
    const auto [t_tilde, m_peak] = find_peak(cache);
    out.t_tilde = t_tilde;
    out.m_peak = m_peak;
    const double F = cache.F();
    const double scale = out.scale();
    out.tangency = std::abs(F - m_peak) <= 1e-7 * scale;

    const auto push_root = [&](double t) {
        out.roots.push_back(t);
        // t^2 m'(t) = <psi'(t u), t u> at a constrained point; dead band
        // relative to the gradient energy of the scaled field.
        const double s = t * t * cache.m_prime(t);
        const double band =
            1e-6 * scaled_gradient_energy(cache, t, cache.crit_exp());
        if (std::abs(s) <= band) {
            out.classes.push_back(NehariClass::Zero);
        } else {
            out.classes.push_back(s > 0.0 ? NehariClass::Plus
                                          : NehariClass::Minus);
        }
    };

    if (F <= 0.0) {
        // m decreases from m_peak to -inf beyond the peak; exactly one root.
        double hi = std::max(2.0 * t_tilde, t_tilde + 1.0);
        int k = 0;
        while (cache.m(hi) > F) {
            hi *= 2.0;
            if (++k >= 80) {
                throw NumericError("root analysis: decreasing tail never "
                                   "reached the source level");
            }
        }
        push_root(bisect_m(cache, F, t_tilde, hi, /*increasing=*/false));
    } else if (F < m_peak) {
        // Ascending side root.
        double lo = t_tilde;
        int k = 0;
        while (cache.m(lo) > F) {
            lo *= 0.5;
            if (++k >= 120) {
                throw NumericError("root analysis: ascending side never "
                                   "dropped below the source level");
            }
        }
        push_root(bisect_m(cache, F, lo, t_tilde, /*increasing=*/true));
        // Descending side root.
        double hi = std::max(2.0 * t_tilde, t_tilde + 1.0);
        k = 0;
        while (cache.m(hi) > F) {
            hi *= 2.0;
            if (++k >= 80) {
                throw NumericError("root analysis: decreasing tail never "
                                   "reached the source level");
            }
        }
        push_root(bisect_m(cache, F, t_tilde, hi, /*increasing=*/false));
    } else {
        out.threshold_violated = true;
    }
    return out;
}

FiberingProfile nehari_roots(const ScalarField& u, const ProblemData& data) {
    return nehari_roots(FiberCache(u, data));
}

NehariClass classify(const ScalarField& u, const ProblemData& data,
                     double membership_tol) {
    const FiberCache cache(u, data);
    const double psi_val = cache.gamma_prime(1.0); // = psi(u)
    const double scale = cache.scale();
    if (std::abs(psi_val) > membership_tol * scale) {
        throw ProjectionError("classify: field is not on the constraint set");
    }
    const double second = psi_prime_pair(u, data); // <psi'(u), u>
    if (std::abs(second) <= 1e-6 * std::abs(cache.A())) {
        return NehariClass::Zero;
    }
    return second > 0.0 ? NehariClass::Plus : NehariClass::Minus;
}

std::vector<FiberSample> scan(const ScalarField& u, const ProblemData& data,
                              double t_lo, double t_hi, int points) {
    if (!(t_lo > 0.0 && t_hi > t_lo) || points < 2) {
        throw DegenerateInputError("scan needs 0 < t_lo < t_hi and >= 2 points");
    }
    const FiberCache cache(u, data);
    std::vector<FiberSample> out;
    out.reserve(static_cast<std::size_t>(points));
    const double log_lo = std::log(t_lo);
    const double step = (std::log(t_hi) - log_lo) / (points - 1);
    for (int i = 0; i < points; ++i) {
        const double t = std::exp(log_lo + step * i);
        out.push_back({t, cache.gamma(t), cache.gamma_prime(t), cache.m(t)});
    }
    return out;
}

} // namespace nehari
