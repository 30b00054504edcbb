#pragma once

#include <vector>

#include "sinhz/levy.hpp"
#include "sinhz/payoffs.hpp"

namespace sinhz {

// Brute-force verifiers. None of them reuses the engine quadrature.

// q0^n / (2 pi) int_{Im xi = c} e^{i x xi} Phi(xi)^n G^(xi) d xi, adaptive Gauss-Kronrod on a flat line.
// The line defaults to the point of the payoff/model strip nearest to the model's centre.
double oracle_european_direct(const LevyModel& m, const PayoffTransform& p, int n, double q0, double x,
                              double tol = 1e-12);
double oracle_line(const LevyModel& m, const PayoffTransform& p);

struct InductionResult {
  std::vector<double> values;  // one per requested x
  double error_estimate = 0.0;  // Richardson estimate, absolute
  double dx = 0.0;               // finest grid step used
  int nodes = 0;
};

// Up-and-out backward induction V_k = 1_{(-inf,h)} P V_{k-1} on a grid anchored at h,
// P applied through cell masses of the increment law computed by FFT of Phi.
InductionResult oracle_barrier_induction(const LevyModel& m, const PayoffTransform& p, int n, double q0,
                                         const std::vector<double>& x, double h, double tol = 1e-6);

// int_{-pi}^{pi} |1 - r e^{i phi}|^{-1} d phi by tanh-sinh quadrature.
double oracle_hardy_numeric(double r);

enum class SeriesKind { geometric, exponential, partial_fraction, pole_at_one };

// Exact V_n of a curated transform, as sign * exp(log_abs):
//   geometric:        1 / (1 - rho q)               -> rho^n
//   exponential:      e^q                            -> 1 / n!
//   partial_fraction: (1 - q)^{-1} (1 - q / 3)^{-1}   -> (3 - 3^{-n}) / 2
//   pole_at_one:      1 / (1 - q)                    -> 1
struct ExactCoefficient {
  long double log_abs = 0.0L;
  int sign = 1;
  double value() const;
};
ExactCoefficient oracle_zinv_series(SeriesKind kind, int n, double rho = 0.5);

}  // namespace sinhz
