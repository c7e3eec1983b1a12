#pragma once

#include <cstdint>
#include <functional>
#include <string>

namespace nehari {

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance
/// `abs_tol`. Throws NumericError when the recursion depth is exhausted
/// before the tolerance is met (message reports the achieved estimate).
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double abs_tol, int max_depth = 48);

/// Solve f(x) = target for strictly increasing f by bisection on [lo, hi].
/// The bracket must satisfy f(lo) <= target <= f(hi). Iterates until the
/// interval width falls below `x_tol` (absolute) or `max_iter` halvings.
double bisect_increasing(const std::function<double(double)>& f, double target,
                         double lo, double hi, double x_tol,
                         int max_iter = 200);

/// Fixed-node Gauss-Legendre panel (5 nodes) on [a, b].
double gauss5(const std::function<double(double)>& f, double a, double b);

/// FNV-1a 64-bit hash of a byte string; used for mesh/provenance hashes.
std::uint64_t fnv1a64(const void* data, std::size_t n);
std::uint64_t fnv1a64(const std::string& s);

/// Accumulate a trivially-copyable value into an FNV-1a state.
std::uint64_t fnv1a64_mix(std::uint64_t state, const void* data,
                          std::size_t n);

} // namespace nehari
