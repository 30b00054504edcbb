#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace sinhz {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

// exp(z) - 1 without cancellation for small |z|.
inline cplx expm1c(cplx z) {
  if (std::abs(z) < 0.5) {
    const double x = z.real(), y = z.imag();
    // e^x cos y - 1 = expm1(x) cos y - 2 sin^2(y/2)
    const double s = std::sin(0.5 * y);
    return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
  }
  return std::exp(z) - 1.0;
}

// log(1 + z), principal branch, accurate for small |z|.
inline cplx log1pc(cplx z) {
  if (std::abs(z) < 0.5) {
    const double x = z.real(), y = z.imag();
    // |1+z|^2 - 1 = 2x + x^2 + y^2
    return {0.5 * std::log1p(2.0 * x + x * x + y * y), std::atan2(y, 1.0 + x)};
  }
  return std::log(1.0 + z);
}

// log(sum_k exp(a_k)) for real a_k, stable.
inline double log_sum_exp(const std::vector<double>& a) {
  if (a.empty()) return -INFINITY;
  double m = a[0];
  for (double v : a) m = std::max(m, v);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double v : a) s += std::exp(v - m);
  return m + std::log(s);
}

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

// Cached rules; safe for concurrent use.
const GaussRule& gauss_legendre(int order);

// Minimal thread fan-out: calls f(i) for i in [0, n) on up to `threads` workers.
// Results must be written to per-index slots so the reduction order stays fixed.
template <class F>
void parallel_for(int n, int threads, F&& f);

}  // namespace sinhz

#include "sinhz/detail/parallel.hpp"
