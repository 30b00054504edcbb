#include "sinhz/zinv.hpp"

#include <boost/math/special_functions/ellint_1.hpp>
#include <cmath>
#include <sstream>

namespace sinhz {

namespace {

// Exact H(r) = int_{-pi}^{pi} |1 - r e^{i phi}|^{-1} d phi via the complete elliptic integral.
double hardy_circle(double r) {
  if (r == 0.0) return 2.0 * kPi;
  const double k = 2.0 * std::sqrt(r) / (1.0 + r);
  return 4.0 * boost::math::ellint_1(k) / (1.0 + r);
}

void check_eps(double eps) {
  if (!(eps > 0 && eps < 1)) throw PreconditionError("eps must lie in (0, 1)");
}

}  // namespace

double effective_radius(const TransformInfo& info, int n) {
  if (info.bound_kind == BoundKind::entire) return std::max(info.radius, std::max(1.0, double(n)));
  return info.radius;
}

double auto_M(double eps, double unit_roundoff, double safety) {
  check_eps(eps);
  return std::clamp(std::log(eps / (unit_roundoff * safety)), 1.0, 23.0);
}

TrapPlan choose_trap_params(double eps, int n, double M) {
  check_eps(eps);
  if (n < 1) throw PreconditionError("choose_trap_params: n >= 1 required");
  if (!(M > 0)) throw PreconditionError("choose_trap_params: M > 0 required");
  TrapPlan p;
  p.M = M;
  p.M1 = 0.9 * M;
  p.r = std::exp(-M / n);
  p.rho = std::exp(p.M1 / n);
  const double E = std::log(1.0 / eps);
  p.N_approx = (double(n) / M) * (E + 2.0 * M);
  const double rm = p.r / p.rho, rp = p.r * p.rho;
  const double lnrho = std::log(p.rho);
  if (n >= 8) {
    const double a = std::log(2.0) + (M + p.M1) + std::log(-std::log1p(-rm));
    const double b = std::log(2.0) + (M - p.M1) + std::log(-std::log1p(-rp));
    const double big = std::max(a, b);
    const double lse = big + std::log(std::exp(a - big) + std::exp(b - big));
    p.N_exact = (E + lse) / lnrho;
  } else {
    // Small n: asymptotics of H(r) are unreliable, use the exact bound with the exact H.
    const double norm = (std::pow(rm, -n) * hardy_circle(rm) + std::pow(rp, -n) * hardy_circle(rp)) /
                        (2.0 * kPi);
    p.N_exact = std::log((norm + eps) / eps) / lnrho;
  }
  p.N = std::max(static_cast<int>(std::ceil(p.N_exact)), n + 1);
  return p;
}

double trapezoid_error_bound(const TransformEvaluator& V, int n, const TrapPlan& plan) {
  const double R = effective_radius(V, n);
  constexpr int kSamples = 4096;
  std::vector<double> logs;
  logs.reserve(2 * kSamples);
  for (double rad : {plan.rho, 1.0 / plan.rho}) {
    const double mod = rad * plan.r * R;
    for (int k = 0; k < kSamples; ++k) {
      const double th = 2.0 * kPi * (k + 0.5) / kSamples;
      const cplx q = std::polar(mod, th);
      const double lv = V.log_eval ? V.log_eval(q).real() : std::log(std::abs(V.eval(q)));
      logs.push_back(lv - n * std::log(mod) - std::log(double(kSamples)));
    }
  }
  const double log_norm = log_sum_exp(logs);
  const double t = std::pow(plan.rho, -plan.N);
  if (!(t < 1.0)) return INFINITY;
  return t / (1.0 - t) * std::exp(log_norm);
}

double inner_disc_length(const SinhZContour& c) {
  auto mod = [&](double y) { return std::abs(c.sigma + kI * c.b * std::sinh(cplx(y, c.omega))); };
  if (mod(0.0) >= 1.0) return 0.0;
  double lo = 0.0, hi = 0.0, step = 0.05;
  while (mod(hi) < 1.0) {
    lo = hi;
    hi += step;
    step *= 1.5;
    if (hi > 700.0) return hi;
  }
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mod(mid) < 1.0 ? lo : hi) = mid;
  }
  return hi;
}

double log_growth_bound(const TransformInfo& V, cplx q) {
  if (V.log_bound) return V.log_bound(q);
  const double lc = std::log(V.C_V);
  switch (V.bound_kind) {
    case BoundKind::entire:
      return lc + q.real();
    case BoundKind::generic:
      return lc + V.a_V * std::log1p(std::abs(q));
    case BoundKind::pole_at_one:
    default: {
      double dmin = INFINITY;
      if (V.poles.empty()) {
        dmin = std::abs(1.0 - q / V.radius);
      } else {
        for (const cplx& p : V.poles) dmin = std::min(dmin, std::abs(1.0 - q / p));
      }
      const double qa = std::max(std::abs(q / V.radius), 1e-300);
      return lc - std::log(dmin) + V.a_V * std::log(qa);
    }
  }
}

bool separates_poles(const SinhZContour& c, const std::vector<cplx>& poles) {
  // The line Im y = s maps onto x = sigma - b sin(t) sqrt(1 + (v / (b cos t))^2), t = omega + s.
  for (const cplx& p : poles) {
    for (double t : {c.omega - c.d, c.omega, c.omega + c.d}) {
      const double v = p.imag() / (c.b * std::cos(t));
      const double xc = c.sigma - c.b * std::sin(t) * std::sqrt(1.0 + v * v);
      if (!(p.real() > xc)) return false;
    }
  }
  return true;
}

namespace {

struct Candidate {
  SinhPlan plan;
  bool valid = false;
};

// log|f~(y)| on the line Im y = s, f~ = (b / 2 pi) cosh(i omega + y) q~^{-n-1} V~(R q~).
double log_integrand(const TransformInfo& V, const SinhZContour& c, double R, int n, double y, double s) {
  const cplx w(y, c.omega + s);
  const cplx qt = c.sigma + kI * c.b * std::sinh(w);
  const double aq = std::abs(qt);
  if (aq == 0.0) return INFINITY;
  return std::log(c.b / (2.0 * kPi)) + std::log(std::abs(std::cosh(w))) - (n + 1) * std::log(aq) +
         log_growth_bound(V, R * qt);
}

// Hardy norm of f~ on the two strip boundaries and the truncation point of the middle line,
// both by sampling; returns false when the bound is not integrable on the sampled range.
bool sample_contour(const TransformInfo& V, const SinhZContour& c, double R, int n, double log_tau,
                    double& log_hardy, double& Lambda) {
  constexpr double h = 0.01;
  constexpr double kMaxY = 300.0;
  std::vector<double> logs;
  for (double s : {-c.d, c.d}) {
    for (int dir = -1; dir <= 1; dir += 2) {
      double peak = -INFINITY;
      for (double y = 0.0; y <= kMaxY; y += h) {
        const double lf = log_integrand(V, c, R, n, dir * y, s);
        if (!std::isfinite(lf)) return false;
        peak = std::max(peak, lf);
        logs.push_back(lf + std::log(h));
        if (y > 1.0 && lf < peak - 60.0 && lf < log_tau - 60.0) break;
        if (y + h > kMaxY) return false;
      }
    }
  }
  log_hardy = log_sum_exp(logs);
  // Truncation: smallest Y such that the tail mass beyond +-Y is below tau / 10 on the middle line.
  Lambda = 0.0;
  for (int dir = -1; dir <= 1; dir += 2) {
    std::vector<double> tail;
    std::vector<double> ys;
    for (double y = 0.0; y <= kMaxY; y += h) {
      const double lf = log_integrand(V, c, R, n, dir * y, 0.0);
      tail.push_back(lf + std::log(h));
      ys.push_back(y);
      if (y > 1.0 && lf < log_tau - 60.0) break;
    }
    double acc = -INFINITY;
    double Y = 0.0;
    for (size_t k = tail.size(); k-- > 0;) {
      const double m = std::max(acc, tail[k]);
      acc = m + std::log(std::exp(acc - m) + std::exp(tail[k] - m));
      if (acc > log_tau - std::log(10.0)) {
        Y = ys[k];
        break;
      }
    }
    Lambda = std::max(Lambda, Y);
  }
  return true;
}

std::pair<double, double> family_start(SinhFamily f, double g, double k_d) {
  switch (f) {
    case SinhFamily::sector_a:
      return {g / 4 + kPi / 8, k_d * (kPi / 8 - g / 4)};
    case SinhFamily::sector_b:
      return {g / 2 - kPi / 8, k_d * (3 * kPi / 8 - g / 2)};
    case SinhFamily::right_opening:
    default:
      return {-(kPi / 4 - g / 2), k_d * (kPi / 4 - g / 2)};
  }
}

// Poles with n ln|p~| > E + 5 carry residues below the target and are ignored.
bool admissible(const TransformInfo& V, const SinhZContour& c, double R, int n, double E) {
  if (V.bound_kind == BoundKind::entire && V.poles.empty()) return true;
  if (!V.poles.empty()) {
    std::vector<cplx> np;
    np.reserve(V.poles.size());
    for (const cplx& p : V.poles) {
      if (n * std::log(std::abs(p / R)) <= E + 5.0) np.push_back(p / R);
    }
    return separates_poles(c, np);
  }
  if (V.bound_kind == BoundKind::pole_at_one) return separates_poles(c, {cplx(1.0)});
  return validate_z_contour(c, V.gamma).inside_region;
}

Candidate plan_family(const TransformInfo& V, SinhFamily fam, const SinhPlan& base, const AnnulusSpec& ann,
                      double g, const SinhOptions& opt) {
  Candidate out;
  auto [omega, d] = family_start(fam, g, opt.k_d);
  const int n = base.n;
  for (int it = 0; it <= opt.max_adjust; ++it) {
    if (it > 0) {
      omega += 0.1 * d;
      d *= 0.8;
    }
    if (!(omega + d < kPi / 2 && omega - d > -kPi / 2)) break;
    SinhZContour c = build_z_contour(ann, omega, d);
    if (!admissible(V, c, base.radius, n, base.E)) continue;
    double log_h = 0.0, Lambda = 0.0;
    const double log_tau = base.log_scale - base.E;
    if (!sample_contour(V, c, base.radius, n, log_tau, log_h, Lambda)) continue;
    SinhPlan p = base;
    p.family = fam;
    p.hardy_log = log_h - base.log_scale;
    c.zeta = 2.0 * kPi * d / (base.E + std::max(p.hardy_log, 0.0));
    p.Lambda0 = inner_disc_length(c);
    p.Lambda_formula = std::log(V.C_V / std::exp(-base.E)) / (n - V.a_V) - std::log(c.b / (4.0 * kPi)) + p.Lambda0;
    c.N = std::max(1, static_cast<int>(std::ceil(std::max(Lambda, p.Lambda0) / c.zeta)));
    c.Lambda = c.N * c.zeta;
    p.contour = c;
    p.adjustments = it;
    out.plan = p;
    out.valid = true;
    return out;
  }
  return out;
}

}  // namespace

SinhPlan choose_sinh_params(const TransformInfo& V, double eps, int n, double M, const SinhOptions& opt) {
  check_eps(eps);
  if (n < 1) throw PreconditionError("choose_sinh_params: n >= 1 required");
  if (!(V.gamma >= 0 && V.gamma < kPi / 2)) throw PreconditionError("choose_sinh_params: gamma in [0, pi/2)");
  SinhPlan base;
  base.n = n;
  base.M = M;
  base.M1 = 0.9 * M;
  base.E = std::log(1.0 / eps);
  base.radius = effective_radius(V, n);
  base.half_sum = V.real_coefficients;
  base.hardy_log_formula = 2.0 * M + std::log(double(n));
  // Scale of R^n V_n the tolerance is measured against: C_V, or Stirling-type for entire transforms.
  base.log_scale = V.bound_kind == BoundKind::entire
                       ? log_growth_bound(V, cplx(base.radius)) - 0.5 * std::log(2.0 * kPi * n)
                       : std::log(V.C_V);
  const double g = std::max(V.gamma, 1e-3);
  const double nm = n / M;
  const AnnulusSpec ann{std::exp(-(M + base.M1) / n), std::exp(-(M - base.M1) / n)};

  std::vector<SinhFamily> fams;
  if (opt.family == SinhFamily::auto_select) {
    fams = {SinhFamily::right_opening, SinhFamily::sector_a, SinhFamily::sector_b};
  } else {
    fams = {opt.family};
  }
  Candidate best;
  for (SinhFamily f : fams) {
    Candidate c = plan_family(V, f, base, ann, g, opt);
    if (c.valid && (!best.valid || c.plan.contour.N < best.plan.contour.N)) best = c;
  }
  if (!best.valid) {
    std::ostringstream os;
    os << "choose_sinh_params: no admissible contour after " << opt.max_adjust << " adjustments (n=" << n
       << ", M=" << M << ", gamma=" << V.gamma << ")";
    throw ConvergenceError(os.str());
  }
  best.plan.predicted_terms =
      nm > 1.0 ? static_cast<int>(std::ceil((base.E + 2.0 * M) * std::log(nm) /
                                            (opt.k_d * kPi * (kPi / 4 - g / 2))))
               : best.plan.contour.N;
  return best.plan;
}

double gain_factor(double /*eps*/, int n, double M) {
  const double nm = n / M;
  if (!(nm > std::exp(1.0))) throw PreconditionError("gain_factor: n/M must exceed e");
  return nm / std::log(nm);
}

double resolvent_bound(cplx q, double norm_P, double gamma, ResolventKind kind,
                       std::optional<double> gamma_prime) {
  if (!(norm_P > 0)) throw PreconditionError("resolvent_bound: ||P|| > 0 required");
  if (kind == ResolventKind::self_adjoint) {
    if (!(std::abs(q) * norm_P < 1.0)) throw DomainError("resolvent_bound: q outside D(0, 1/||P||)");
    return 4.0 / std::abs(1.0 - q * norm_P);
  }
  if (q == cplx(0.0)) return 1.0;
  const double sup = std::min(kPi / 2, kPi - std::abs(std::arg(-q)));
  const double gp = gamma_prime.value_or(sup);
  if (!(gp > gamma) || gp > sup) throw DomainError("resolvent_bound: q outside -C_{pi-gamma'}");
  return 1.0 / std::sin(gp - gamma);
}

}  // namespace sinhz
