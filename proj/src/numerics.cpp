#include "nehari/numerics.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

#include "nehari/errors.hpp"

namespace nehari {

namespace {

double simpson_panel(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double simpson_recurse(const std::function<double(double)>& f, double a,
                       double fa, double b, double fb, double fm, double whole,
                       double tol, int depth, double* achieved) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = simpson_panel(a, fa, m, fm, flm);
    const double right = simpson_panel(m, fm, b, fb, frm);
    const double err = left + right - whole;
    if (std::abs(err) <= 15.0 * tol || depth <= 0) {
        if (depth <= 0) *achieved = std::max(*achieved, std::abs(err) / 15.0);
        return left + right + err / 15.0;
    }
    return simpson_recurse(f, a, fa, m, fm, flm, left, 0.5 * tol, depth - 1,
                           achieved) +
           simpson_recurse(f, m, fm, b, fb, frm, right, 0.5 * tol, depth - 1,
                           achieved);
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double abs_tol, int max_depth) {
    if (a == b) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double fm = f(0.5 * (a + b));
    const double whole = simpson_panel(a, fa, b, fb, fm);
    double achieved = 0.0;
    const double value = simpson_recurse(f, a, fa, b, fb, fm, whole, abs_tol,
                                         max_depth, &achieved);
    if (achieved > abs_tol) {
        std::ostringstream msg;
        msg << "adaptive quadrature exhausted depth " << max_depth
            << " on [" << a << ", " << b << "]: achieved abs error ~"
            << achieved << " > tol " << abs_tol;
        throw NumericError(msg.str());
    }
    if (!std::isfinite(value)) {
        throw NumericError("adaptive quadrature produced a non-finite value");
    }
    return value;
}

double bisect_increasing(const std::function<double(double)>& f, double target,
                         double lo, double hi, double x_tol, int max_iter) {
    double flo = f(lo);
    double fhi = f(hi);
    if (!(flo <= target && target <= fhi)) {
        std::ostringstream msg;
        msg << "bisection bracket does not contain the target: f(" << lo
            << ")=" << flo << ", f(" << hi << ")=" << fhi << ", target "
            << target;
        throw NumericError(msg.str());
    }
    for (int i = 0; i < max_iter && (hi - lo) > x_tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (f(mid) < target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double gauss5(const std::function<double(double)>& f, double a, double b) {
    // Nodes/weights for [-1, 1].
    static const double x[5] = {-0.906179845938663992797626878299,
                                -0.538469310105683091036314420700, 0.0,
                                0.538469310105683091036314420700,
                                0.906179845938663992797626878299};
    static const double w[5] = {0.236926885056189087514264040720,
                                0.478628670499366468041291514836,
                                0.568888888888888888888888888889,
                                0.478628670499366468041291514836,
                                0.236926885056189087514264040720};
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double sum = 0.0;
    for (int i = 0; i < 5; ++i) sum += w[i] * f(c + h * x[i]);
    return sum * h;
}

std::uint64_t fnv1a64(const void* data, std::size_t n) {
    return fnv1a64_mix(0xcbf29ce484222325ULL, data, n);
}

std::uint64_t fnv1a64(const std::string& s) {
    return fnv1a64(s.data(), s.size());
}

std::uint64_t fnv1a64_mix(std::uint64_t state, const void* data,
                          std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        state ^= bytes[i];
        state *= 0x100000001b3ULL;
    }
    return state;
}

} // namespace nehari
