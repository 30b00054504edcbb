#include "sinhz/oracles.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>

#include "sinhz/errors.hpp"

namespace sinhz {

namespace {

double clamp_into(double v, double lo, double hi) {
  const double w = hi - lo;
  const double kappa = std::isfinite(w) ? std::min(1.0, 0.25 * w) : 1.0;
  return std::clamp(v, lo + kappa, hi - kappa);
}

// Cell-mass kernels: int_0^D e^{-i t xi} dt / D and int_0^D (t / D) e^{-i t xi} dt / D as functions of z = D xi.
cplx cell_flat(double z) {
  if (std::abs(z) < 1e-4) return {1.0 - z * z / 6.0, -z / 2.0};
  return (1.0 - std::exp(cplx(0.0, -z))) / cplx(0.0, z);
}

cplx cell_ramp(double z) {
  if (std::abs(z) < 1e-3) return {0.5 - z * z / 8.0, -z / 3.0 + z * z * z / 30.0};
  const cplx e = std::exp(cplx(0.0, -z));
  return kI * e / z - (1.0 - e) / (z * z);
}

struct CellMasses {
  // A[k] = P(Y in [kD, (k+1)D)), B[k] = E[(Y - kD)/D ; Y in that cell], for k in [-K, K).
  std::vector<double> A, B, cdf;  // cdf[k] = P(Y < kD)
  int K = 0;
  double at(const std::vector<double>& v, int k) const {
    return (k < -K || k >= K) ? 0.0 : v[k + K];
  }
  double cdf_at(int k) const {
    if (k <= -K) return 0.0;
    if (k >= K) return 1.0;
    return cdf[k + K];
  }
};

// Nyquist frequency beyond which |Phi(xi)| / |xi| is below 1e-17 on both half-lines.
double phi_cutoff(const LevyModel& m) {
  double xi = 1.0;
  while (xi < 1e9) {
    if (std::abs(m.phi(cplx(xi))) / xi < 1e-17 && std::abs(m.phi(cplx(-xi))) / xi < 1e-17) return xi;
    xi *= 1.25;
  }
  throw ConvergenceError("oracle_barrier_induction: characteristic function decays too slowly for the grid oracle");
}

CellMasses cell_masses(const LevyModel& m, double D, double reach) {
  const double xi_max = phi_cutoff(m);
  const int r = std::max(1, static_cast<int>(std::ceil(D * xi_max / kPi)));
  const double ds = D / r;
  size_t N = 1024;
  while (N * ds < 2.0 * (reach + 2.0 * D)) N *= 2;
  if (N > (size_t(1) << 24)) throw ConvergenceError("oracle_barrier_induction: FFT grid too large");
  const double dxi = 2.0 * kPi / (N * ds);
  std::vector<std::complex<double>> fa(N), fb(N), outa, outb;
  for (size_t k = 0; k < N; ++k) {
    const long kk = k < N / 2 ? long(k) : long(k) - long(N);
    const double xi = kk * dxi;
    const cplx ph = m.phi(cplx(xi));
    fa[k] = ph * cell_flat(D * xi) * D;
    fb[k] = ph * cell_ramp(D * xi) * D;
  }
  Eigen::FFT<double> fft;
  fft.fwd(outa, fa);
  fft.fwd(outb, fb);
  CellMasses cm;
  cm.K = static_cast<int>(std::floor(reach / D));
  cm.A.resize(2 * cm.K);
  cm.B.resize(2 * cm.K);
  cm.cdf.resize(2 * cm.K);
  const double scale = dxi / (2.0 * kPi);
  for (int k = -cm.K; k < cm.K; ++k) {
    const long j = long(k) * r;
    const size_t idx = static_cast<size_t>(j >= 0 ? j : long(N) + j);
    cm.A[k + cm.K] = scale * outa[idx].real();
    cm.B[k + cm.K] = scale * outb[idx].real();
  }
  double acc = 0.0;
  for (int k = -cm.K; k < cm.K; ++k) {
    cm.cdf[k + cm.K] = acc;
    acc += cm.A[k + cm.K];
  }
  return cm;
}

// Values at nodes x_i = h - i D, i = 0..M (node 0 holds the left limit at h).
std::vector<double> induct(const LevyModel& m, const PayoffTransform& p, int n, double h, double D, int M,
                           double reach) {
  const CellMasses cm = cell_masses(m, D, reach);
  const double tiny = 1e-12 * D;
  // Cell j = [x_{j+1}, x_j]; one-sided payoff limits keep jumps at nodes exact.
  std::vector<double> left(M), right(M);
  for (int j = 0; j < M; ++j) {
    left[j] = p.value(h - (j + 1) * D + tiny);
    right[j] = p.value(h - j * D - tiny);
  }
  double tail_value = p.value(h - M * D - tiny);
  std::vector<double> V(M + 1, 0.0);
  for (int step = 0; step < n; ++step) {
    std::vector<double> W(M + 1, 0.0);
    for (int i = 0; i <= M; ++i) {
      double s = 0.0;
      const int jlo = std::max(0, i - cm.K);
      const int jhi = std::min(M - 1, i + cm.K);
      for (int j = jlo; j <= jhi; ++j) {
        const int k = i - j - 1;
        const double a = cm.at(cm.A, k), b = cm.at(cm.B, k);
        s += left[j] * (a - b) + right[j] * b;
      }
      s += tail_value * cm.cdf_at(i - M);
      W[i] = s;
    }
    V.swap(W);
    for (int j = 0; j < M; ++j) {
      left[j] = V[j + 1];
      right[j] = V[j];
    }
    tail_value = V[M];
  }
  if (n == 0) {
    for (int i = 0; i <= M; ++i) V[i] = p.value(h - i * D - (i == 0 ? tiny : 0.0));
  }
  return V;
}

// Four-point Lagrange interpolation on the node grid.
double interp(const std::vector<double>& V, double h, double D, double x) {
  const double t = (h - x) / D;
  const int M = static_cast<int>(V.size()) - 1;
  int i0 = static_cast<int>(std::floor(t)) - 1;
  i0 = std::clamp(i0, 0, std::max(0, M - 3));
  double s = 0.0;
  for (int a = 0; a < 4 && i0 + a <= M; ++a) {
    double w = 1.0;
    for (int b = 0; b < 4 && i0 + b <= M; ++b) {
      if (b != a) w *= (t - (i0 + b)) / double(a - b);
    }
    s += w * V[i0 + a];
  }
  return s;
}

}  // namespace

double oracle_line(const LevyModel& m, const PayoffTransform& p) {
  const double lo = std::max(m.strip_minus(), p.strip_lo);
  const double hi = std::min(m.strip_plus(), p.strip_hi);
  if (!(lo < hi)) throw PreconditionError("oracle: payoff strip and model strip do not intersect");
  double centre = 0.0;
  if (auto b = m.symmetrizing_beta()) {
    centre = -*b;
  } else if (std::isfinite(m.strip_minus()) && std::isfinite(m.strip_plus())) {
    centre = 0.5 * (m.strip_minus() + m.strip_plus());
  }
  return clamp_into(centre, lo, hi);
}

double oracle_european_direct(const LevyModel& m, const PayoffTransform& p, int n, double q0, double x,
                              double tol) {
  if (n < 0) throw PreconditionError("oracle_european_direct: n >= 0 required");
  if (p.terms.empty()) return 0.0;
  const double c = oracle_line(m, p);
  auto f = [&](double t) {
    const cplx xi(t, c);
    const cplx v = std::exp(kI * x * xi - double(n) * m.psi(xi)) * ghat_eval(p, xi);
    return v.real();
  };
  if (n == 0 && x != 0.0) {
    // Phi^0 leaves only the algebraic decay of G^; the oscillatory tail needs a Fourier-specific rule.
    const double w = std::abs(x);
    const double sgn = x > 0 ? 1.0 : -1.0;
    auto g = [&](double t) { return std::exp(-x * c) * ghat_eval(p, cplx(t, c)); };
    boost::math::quadrature::ooura_fourier_cos<double> fc(tol);
    boost::math::quadrature::ooura_fourier_sin<double> fs(tol);
    const double Ic = fc.integrate([&](double t) { return g(t).real(); }, w).first;
    const double Is = fs.integrate([&](double t) { return g(t).imag(); }, w).first;
    const double I = Ic - sgn * Is;
    if (!std::isfinite(I)) throw ConvergenceError("oracle_european_direct: quadrature failed");
    return I / kPi;
  }
  double err = 0.0;
  // Real payoff: the integrand at -t is the conjugate of the one at t.
  const double I = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, 0.0, std::numeric_limits<double>::infinity(), 20, tol, &err);
  if (!std::isfinite(I)) throw ConvergenceError("oracle_european_direct: quadrature failed");
  return std::pow(q0, n) * I / kPi;
}

InductionResult oracle_barrier_induction(const LevyModel& m, const PayoffTransform& p, int n, double q0,
                                         const std::vector<double>& x, double h, double tol) {
  if (n < 0 || n > 32) throw PreconditionError("oracle_barrier_induction: 0 <= n <= 32 required");
  if (x.empty()) return {};
  const double sd = std::sqrt(increment_variance(m));
  double xmin = *std::min_element(x.begin(), x.end());
  const double L = std::max(h - xmin, 0.0) + 10.0 * sd * std::sqrt(double(std::max(n, 1))) + 40.0 * sd;
  const double reach = std::min(L, 40.0 * sd + 1.0);
  // Align the payoff level with the grid so that its kink/jump falls on a node.
  double span = h - p.level();
  if (!(span > 0) || p.kind == PayoffKind::custom) span = std::max(h - xmin, sd);
  const double D0 = std::min(sd / 40.0, span / 8.0);
  const int cells = static_cast<int>(std::ceil(span / D0));
  double D = span / cells;

  InductionResult res;
  std::vector<double> coarse, fine;
  auto run = [&](double step) {
    const int M = static_cast<int>(std::ceil(L / step));
    const std::vector<double> V = induct(m, p, n, h, step, M, reach);
    std::vector<double> out;
    for (double xi : x) out.push_back(xi >= h ? 0.0 : std::pow(q0, n) * interp(V, h, step, xi));
    res.nodes = M + 1;
    return out;
  };
  coarse = run(D);
  for (int level = 0; level < 3; ++level) {
    fine = run(D / 2);
    double err = 0.0, scale = 0.0;
    res.values.assign(x.size(), 0.0);
    for (size_t i = 0; i < x.size(); ++i) {
      res.values[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
      err = std::max(err, std::abs(fine[i] - coarse[i]) / 3.0);
      scale = std::max(scale, std::abs(res.values[i]));
    }
    res.error_estimate = err;
    res.dx = D / 2;
    if (err <= tol * std::max(scale, 1e-300) || err == 0.0) return res;
    D /= 2;
    coarse.swap(fine);
  }
  throw ConvergenceError("oracle_barrier_induction: grid too coarse (Richardson estimate above tolerance)");
}

double oracle_hardy_numeric(double r) {
  if (!(r >= 0 && r < 1)) throw PreconditionError("oracle_hardy_numeric: r in [0, 1) required");
  if (r == 0.0) return 2.0 * kPi;
  boost::math::quadrature::tanh_sinh<double> ts;
  auto f = [r](double phi) {
    // |1 - r e^{i phi}|^2 = (1 - r)^2 + 4 r sin^2(phi / 2), written without cancellation.
    const double s = std::sin(0.5 * phi);
    return 1.0 / std::sqrt((1.0 - r) * (1.0 - r) + 4.0 * r * s * s);
  };
  return 2.0 * ts.integrate(f, 0.0, kPi);
}

double ExactCoefficient::value() const { return sign * static_cast<double>(std::exp(log_abs)); }

ExactCoefficient oracle_zinv_series(SeriesKind kind, int n, double rho) {
  if (n < 0) throw PreconditionError("oracle_zinv_series: n >= 0 required");
  ExactCoefficient c;
  switch (kind) {
    case SeriesKind::geometric:
      c.log_abs = n * std::log(std::abs(static_cast<long double>(rho)));
      c.sign = (rho < 0 && n % 2 == 1) ? -1 : 1;
      break;
    case SeriesKind::exponential:
      c.log_abs = -std::lgamma(static_cast<long double>(n) + 1.0L);
      break;
    case SeriesKind::partial_fraction:
      c.log_abs = std::log((3.0L - std::pow(3.0L, -static_cast<long double>(n))) / 2.0L);
      break;
    case SeriesKind::pole_at_one:
      c.log_abs = 0.0L;
      break;
  }
  return c;
}

}  // namespace sinhz
