#include "sinhz/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <sstream>

#include "sinhz/errors.hpp"
#include "sinhz/oracles.hpp"

namespace sinhz {

namespace {

constexpr double kMaxY = 45.0;

struct XiRule {
  std::vector<cplx> xi;
  std::vector<cplx> w;  // sum_k w_k f(xi_k) approximates int f(xi) d xi
  size_t size() const { return xi.size(); }
};

double payoff_scale(const PayoffTransform& p) {
  switch (p.kind) {
    case PayoffKind::put:
    case PayoffKind::call:
      return p.strike;
    case PayoffKind::digital_up:
    case PayoffKind::digital_down:
      return std::abs(p.amplitude);
    default:
      return 1.0;
  }
}

// G == 0: no terms, or a built-in kind with zero amplitude.
bool zero_payoff(const PayoffTransform& p) { return p.terms.empty() || payoff_scale(p) == 0.0; }

PayoffTransform single_term(const PayoffTransform& p, const PayoffTerm& t) {
  PayoffTransform s = p;
  s.terms = {t};
  return s;
}

cplx g0_at(const PayoffTerm& t, cplx xi) { return t.g0(xi); }

SinhXiContour flat_as_sinh(const FlatLine& f) {
  SinhXiContour c;
  c.omega1 = f.omega;
  c.b = 1.0;
  return c;
}

// Trapezoid nodes k zeta of a sinh contour, truncated where env(y) falls below rel_tiny x its peak.
template <class Env>
XiRule sinh_rule(const SinhXiContour& c, double zeta, Env&& env, double rel_tiny) {
  XiRule r;
  double peak = env(0.0);
  std::vector<std::pair<double, double>> keep;
  auto walk = [&](int dir) {
    int quiet = 0;
    for (long k = dir > 0 ? 1 : -1;; k += dir) {
      const double y = k * zeta;
      if (std::abs(y) > kMaxY) throw ConvergenceError("contour truncation: integrand does not decay within |y| <= 45");
      const double e = env(y);
      peak = std::max(peak, e);
      keep.push_back({y, e});
      quiet = e < rel_tiny * peak ? quiet + 1 : 0;
      if (quiet >= 4) break;
    }
  };
  keep.push_back({0.0, peak});
  walk(1);
  walk(-1);
  std::sort(keep.begin(), keep.end());
  for (const auto& [y, e] : keep) {
    if (e < 1e-3 * rel_tiny * peak) continue;
    r.xi.push_back(chi_xi_eval(c, y));
    r.w.push_back(zeta * chi_xi_deriv(c, y));
  }
  return r;
}

// Composite Gauss-Legendre along a curve; panel breakpoints follow the curve samples.
struct CurvePanels {
  std::vector<double> breaks;  // ascending, symmetric
};

CurvePanels curve_panels(const ExtendedCurve& c, double X) {
  CurvePanels p;
  std::vector<double> right;
  const double flat = c.flatten_at().value_or(std::numeric_limits<double>::infinity());
  for (const auto& s : c.samples()) {
    if (s.t > 0 && s.t < std::min(X, flat)) right.push_back(s.t);
  }
  double t = right.empty() ? 0.0 : right.back();
  if (flat < X) {
    right.push_back(flat);
    t = flat;
    while (t < X) {
      t = std::min(X, t + std::max(0.5, 0.125 * t));
      right.push_back(t);
    }
  } else if (t < X) {
    right.push_back(X);
  }
  for (auto it = right.rbegin(); it != right.rend(); ++it) p.breaks.push_back(-*it);
  p.breaks.push_back(0.0);
  p.breaks.insert(p.breaks.end(), right.begin(), right.end());
  return p;
}

XiRule curve_rule(const ExtendedCurve& c, const CurvePanels& p, int level, int order = 8) {
  XiRule r;
  const GaussRule& g = gauss_legendre(order);
  const int split = 1 << level;
  for (size_t k = 0; k + 1 < p.breaks.size(); ++k) {
    const double h = (p.breaks[k + 1] - p.breaks[k]) / split;
    for (int j = 0; j < split; ++j) {
      const double a = p.breaks[k] + j * h;
      for (size_t i = 0; i < g.x.size(); ++i) {
        const double t = a + 0.5 * h * (1.0 + g.x[i]);
        r.xi.push_back(c.point(t));
        r.w.push_back(0.5 * h * g.w[i] * c.deriv(t));
      }
    }
  }
  return r;
}

struct StripInfo {
  double lo, hi;
};

StripInfo joint_strip(const LevyModel& m, const PayoffTransform& p) {
  const double lo = std::max(m.strip_minus(), p.strip_lo);
  const double hi = std::min(m.strip_plus(), p.strip_hi);
  if (!(lo < hi)) {
    std::ostringstream os;
    os << "payoff strip (" << p.strip_lo << ", " << p.strip_hi << ") does not meet the model strip ("
       << m.strip_minus() << ", " << m.strip_plus() << ")";
    throw PreconditionError(os.str());
  }
  return {lo, hi};
}

double model_centre(const LevyModel& m) {
  if (auto b = m.symmetrizing_beta()) return -*b;
  if (std::isfinite(m.strip_minus()) && std::isfinite(m.strip_plus()))
    return 0.5 * (m.strip_minus() + m.strip_plus());
  return 0.0;
}

double clamp_margin(double v, double lo, double hi) {
  const double w = hi - lo;
  const double kappa = std::isfinite(w) ? std::min(1.0, 0.25 * w) : 1.0;
  return std::clamp(v, lo + kappa, hi - kappa);
}

double sector_limit(const LevyModel& m) {
  const double nu0 = m.asymptotics().nu0;
  return nu0 > 0 ? std::min(kPi / 2, kPi / (2 * nu0)) : kPi / 2;
}

// b such that the strip image of a contour with vertex v stays within (lo, hi) on iR.
double fit_b(double v, double omega, double d, double lo, double hi) {
  double b = std::numeric_limits<double>::infinity();
  const double up = std::sin(omega + d) - std::sin(omega);
  const double dn = std::sin(omega) - std::sin(omega - d);
  if (std::isfinite(hi) && up > 0) b = std::min(b, (hi - v) / up);
  if (std::isfinite(lo) && dn > 0) b = std::min(b, (v - lo) / dn);
  return std::isfinite(b) ? 0.8 * b : 1.0;
}

SinhXiContour make_sinh(double v, double omega, double d, double b) {
  SinhXiContour c;
  c.omega = omega;
  c.d = d;
  c.b = b;
  c.omega1 = v - b * std::sin(omega);
  return c;
}

// ---------------------------------------------------------------------------------------------
// Outer Z-inversion with parallel node evaluation.

struct ZRun {
  double value = 0.0;
  std::optional<SinhPlan> plan;
  int nodes = 0;
};

ZRun z_invert(const TransformEvaluator& V, int n, double eps, int threads) {
  ZRun out;
  const double M = auto_M(eps);
  std::vector<ZNode<cplx>> nodes;
  double radius = 1.0;
  if (n < SinhOptions{}.n_min) {
    const TrapPlan tp = choose_trap_params(eps, n, M);
    nodes = trapezoid_nodes<cplx>(V, n, tp);
    radius = effective_radius(V, n);
  } else {
    SinhPlan sp = choose_sinh_params(V, eps, n, M);
    nodes = sinh_nodes<cplx>(sp, n);
    radius = sp.radius;
    out.plan = sp;
  }
  std::vector<cplx> vals(nodes.size());
  parallel_for(static_cast<int>(nodes.size()), threads, [&](int j) { vals[j] = V.eval(nodes[j].q); });
  ScaledValue<cplx> sv = combine_nodes(nodes, vals, V.real_coefficients);
  sv.radius = radius;
  sv.radius_power = n;
  out.value = sv.value().real();
  out.nodes = static_cast<int>(nodes.size());
  return out;
}

// Keeps poles whose residue can reach the target (n ln(|p| / R) <= E + 5).
std::vector<cplx> relevant_poles(const std::vector<cplx>& poles, double R, int n, double E) {
  std::vector<cplx> out;
  for (const cplx& p : poles) {
    if (std::isfinite(p.real()) && std::isfinite(p.imag()) && n * std::log(std::abs(p) / R) <= E + 5.0)
      out.push_back(p);
  }
  return out;
}

// Half-angle of the sector holding the Phi values whose poles 1/Phi can matter at index n; values further
// down the spiral towards 0 have poles beyond n ln(|p| / R) > E + 5 and are ignored by the planner anyway.
double sector_gamma(const std::vector<cplx>& phis, double s, int n, double E) {
  const double floor = s * std::exp(-(E + 5.0) / n);
  double g = 0.0;
  for (const cplx& f : phis) {
    if (std::abs(f) >= floor) g = std::max(g, std::abs(std::arg(f)));
  }
  return std::min(g, 1.5);
}

// ---------------------------------------------------------------------------------------------
// European core: V_n for a single payoff term from a fixed xi rule.

struct EuroCore {
  double value = 0.0;
  int z_nodes = 0;
  std::optional<SinhPlan> plan;
};

// eps is relative to max(|V_n|, abs_floor).
EuroCore european_core(const LevyModel& m, const PayoffTerm& term, double x, int n, const XiRule& rule, double eps,
                       double abs_floor, int threads) {
  const size_t K = rule.size();
  std::vector<cplx> c(K), phi(K);
  double s = 0.0, l1 = 0.0;
  for (size_t k = 0; k < K; ++k) {
    const cplx xi = rule.xi[k];
    phi[k] = m.phi(xi);
    c[k] = rule.w[k] / (2.0 * kPi) * std::exp(kI * (x - term.a) * xi) * g0_at(term, xi) * phi[k];
    s = std::max(s, std::abs(phi[k]));
    l1 += std::abs(c[k]);
  }
  EuroCore out;
  if (l1 == 0.0) return out;
  // q V~(q) = q sum_k c_k / (1 - q Phi_k): rational with poles 1 / Phi_k.
  TransformEvaluator V;
  V.eval = [&](const cplx& q) {
    cplx acc = 0.0;
    for (size_t k = 0; k < K; ++k) acc += c[k] / (1.0 - q * phi[k]);
    return q * acc;
  };
  V.bound_kind = BoundKind::pole_at_one;
  V.radius = 1.0 / s;
  V.C_V = l1;
  V.a_V = 0.0;
  V.real_coefficients = true;
  // The planner's tolerance is relative to C_V, while cancellation in the xi sum can make |V_n| much smaller
  // than C_V s^n. The fixed-rule coefficient sum_k c_k (Phi_k / s)^{n-1} sets the target scale instead.
  cplx dn = 0.0;
  for (size_t k = 0; k < K; ++k) dn += c[k] * std::exp(static_cast<double>(n - 1) * std::log(phi[k] / s));
  const double log_target = std::max(std::log(std::max(std::abs(dn), 1e-300)) - std::log(s),
                                     std::log(abs_floor) - n * std::log(s));
  const double eps_z = std::clamp(eps * std::exp(log_target - std::log(l1)), std::min(eps, 1e-13), eps);
  V.gamma = sector_gamma(phi, s, n, std::log(1.0 / eps_z));
  // The planner only needs the bound to a few percent: merge nodes whose Phi agree in modulus and angle to
  // well within the contour clearance M / n.
  const double inv_w = 1.0 / std::min(0.01, 0.1 * auto_M(eps_z) / n);
  std::map<std::pair<long, long>, std::pair<double, cplx>> bins;
  for (size_t k = 0; k < K; ++k) {
    if (std::abs(phi[k]) < 1e-300 || c[k] == 0.0) continue;
    const std::pair<long, long> key{std::lround(inv_w * std::log(std::abs(phi[k]))), std::lround(inv_w * std::arg(phi[k]))};
    auto [it, fresh] = bins.try_emplace(key, 0.0, phi[k]);
    it->second.first += std::abs(c[k]);
    if (std::abs(phi[k]) > std::abs(it->second.second)) it->second.second = phi[k];
  }
  auto mass = std::make_shared<std::vector<std::pair<double, cplx>>>();
  std::vector<cplx> poles;
  for (const auto& [key, v] : bins) {
    mass->push_back(v);
    poles.push_back(1.0 / v.second);
  }
  V.poles = relevant_poles(poles, V.radius, n, std::log(1.0 / eps_z));
  V.log_bound = [mass](cplx q) {
    double acc = 0.0;
    for (const auto& [w, f] : *mass) acc += w / std::abs(1.0 - q * f);
    return std::log(std::max(acc * std::abs(q), 1e-300));
  };
  const ZRun z = z_invert(V, n, eps_z, threads);
  out.value = z.value;
  out.z_nodes = z.nodes;
  out.plan = z.plan;
  return out;
}

double refine_tol(double eps, double value, double scale) { return eps * std::max(std::abs(value), 1e-8 * scale); }

void check_request(const PricingRequest& req) {
  if (req.n < 0) throw PreconditionError("pricing: n >= 0 required");
  if (!(req.q0 > 0.0 && req.q0 <= 1.0)) throw PreconditionError("pricing: q0 in (0, 1] required");
  if (!(req.eps > 0.0 && req.eps < 1.0)) throw PreconditionError("pricing: eps in (0, 1) required");
}

bool symmetric_model(const LevyModel& m) {
  auto b = m.symmetrizing_beta();
  return b && symmetry_check(m, EsscherShift{*b}, 1e-10);
}

}  // namespace

// ---------------------------------------------------------------------------------------------

SinhXiContour european_contour(const LevyModel& m, const PayoffTransform& p, double x) {
  if (p.terms.empty()) throw PreconditionError("european_contour: payoff has no terms");
  const StripInfo st = joint_strip(m, p);
  const double v = clamp_margin(model_centre(m), st.lo, st.hi);
  const double a = p.terms.front().a;
  const double lim = sector_limit(m);
  double omega = 0.0, d = 0.0;
  if (x != a) {
    omega = std::copysign(0.25 * lim, x - a);
    d = 0.9 * std::abs(omega);
  } else {
    d = 0.5 * lim;
  }
  return make_sinh(v, omega, d, fit_b(v, omega, d, st.lo, st.hi));
}

PricingResult price_european_symmetric(const PricingRequest& req) {
  check_request(req);
  PricingResult res;
  res.method = "european_symmetric";
  if (zero_payoff(req.payoff)) return res;
  if (req.n == 0) {
    res.price = req.payoff.value(req.x);
    return res;
  }
  const LevyModel& m = req.model;
  if (!symmetric_model(m))
    throw PreconditionError("price_european_symmetric: no Esscher shift makes the model symmetric");
  const double E = std::log(1.0 / req.eps);
  const double scale = payoff_scale(req.payoff);
  double total = 0.0, err = 0.0;
  for (const PayoffTerm& term : req.payoff.terms) {
    const PayoffTransform pt = single_term(req.payoff, term);
    const SinhXiContour c = european_contour(m, pt, req.x);
    const double s0 = std::max(1.0, std::abs(m.phi(kI * (c.omega1 + c.b * std::sin(c.omega)))));
    const double qmax = 2.0 * std::exp((E + 5.0) / req.n) / s0;
    auto env = [&](double y) {
      const cplx xi = chi_xi_eval(c, y);
      return std::abs(std::exp(kI * (req.x - term.a) * xi) * g0_at(term, xi) * chi_xi_deriv(c, y)) *
             std::min(1.0, std::abs(m.phi(xi)) * qmax);
    };
    double zeta = 2.0 * kPi * c.d / (E + 10.0);
    double prev = std::numeric_limits<double>::quiet_NaN();
    bool done = false;
    for (int r = 0; r < 8 && !done; ++r, zeta *= 0.5) {
      const XiRule rule = sinh_rule(c, zeta, env, 1e-3 * req.eps);
      const EuroCore ec = european_core(m, term, req.x, req.n, rule, 0.1 * req.eps, 1e-8 * scale, req.threads);
      res.z_nodes = ec.z_nodes;
      res.xi_nodes = static_cast<int>(rule.size());
      res.z_plan = ec.plan;
      res.refinements = r;
      if (std::isfinite(prev) && std::abs(ec.value - prev) <= refine_tol(req.eps, ec.value, scale)) {
        total += ec.value;
        err += std::abs(ec.value - prev);
        done = true;
      }
          prev = ec.value;
    }
    if (!done) throw ConvergenceError("price_european_symmetric: xi-quadrature refinement did not settle");
  }
  const double disc = std::pow(req.q0, req.n);
  res.price = disc * total;
  res.error_estimate = disc * err;
  return res;
}

namespace {

enum class CurveCase { plain, flattened };

CurveCase curve_case(const LevyModel& m) {
  const Asymptotics& as = asymptotic_params(m);
  if (as.nu0 > 0.5 * (as.nu_bar + 1.0)) return CurveCase::plain;
  bool ok = as.nu0 > 0 && as.nu0 < 1;
  for (const auto& t : as.terms) {
    if (t.nu > 0 && !(t.d.imag() == 0.0 && t.d.real() > 0)) ok = false;
  }
  if (ok) return CurveCase::flattened;
  std::ostringstream os;
  os << "unsupported case: nu0 = " << as.nu0 << ", nu_bar = " << as.nu_bar
     << " (need nu0 > (nu_bar + 1)/2, or nu0 in (0,1) with positive coefficients)";
  throw PreconditionError(os.str());
}

}  // namespace

PricingResult price_european_nonsymmetric(const PricingRequest& req) {
  check_request(req);
  PricingResult res;
  res.method = "european_nonsymmetric";
  if (zero_payoff(req.payoff)) return res;
  if (req.n == 0) {
    res.price = req.payoff.value(req.x);
    return res;
  }
  if (req.n < 2) throw PreconditionError("price_european_nonsymmetric: n > 1 required");
  const LevyModel& m = req.model;
  const CurveCase cc = curve_case(m);
  const double E = std::log(1.0 / req.eps);
  const double scale = payoff_scale(req.payoff);
  double total = 0.0, err = 0.0;
  for (const PayoffTerm& term : req.payoff.terms) {
    const PayoffTransform pt = single_term(req.payoff, term);
    const StripInfo st = joint_strip(m, pt);
    const double u = clamp_margin(model_centre(m), st.lo, st.hi);
    // Wings bend towards the decaying side of e^{i(x-a) xi} when the sign of p(delta) allows it.
    double delta = 0.05;
    if (p_delta(m, delta) * (req.x - term.a) < 0 && p_delta(m, -delta) * (req.x - term.a) >= 0) delta = -delta;
    const double s0 = std::max(1.0, std::abs(m.phi(kI * u)));
    const double qmax = 2.0 * std::exp((E + 5.0) / req.n) / s0;
    auto env_at = [&](const ExtendedCurve& c, double t) {
      const cplx xi = c.point(t);
      return std::abs(std::exp(kI * (req.x - term.a) * xi) * g0_at(term, xi) * c.deriv(t)) *
             std::min(1.0, std::abs(m.phi(xi)) * qmax);
    };
    // Grow the traced range until the envelope has decayed at its end.
    double X = 32.0;
    std::shared_ptr<ExtendedCurve> curve;
    for (;;) {
      curve = std::make_shared<ExtendedCurve>(build_extended_curve(m, delta, u, X));
      double peak = 0.0;
      for (const auto& s : curve->samples()) peak = std::max(peak, env_at(*curve, s.t));
      if (cc == CurveCase::flattened) {
        for (double xs = 8.0; xs < X; xs *= 2.0) {
          try {
            *curve = flatten_curve(m, *curve, xs);
            break;
          } catch (const PreconditionError&) {
          }
        }
      }
      if (env_at(*curve, X) < 1e-6 * req.eps * peak) break;
      X *= 2.0;
      if (X > 1e7) throw ConvergenceError("price_european_nonsymmetric: integrand does not decay along the curve");
    }
    const CurvePanels panels = curve_panels(*curve, X);
    double prev = std::numeric_limits<double>::quiet_NaN();
    bool done = false;
    for (int level = 0; level < 7 && !done; ++level) {
      const XiRule rule = curve_rule(*curve, panels, level);
      const EuroCore ec = european_core(m, term, req.x, req.n, rule, 0.1 * req.eps, 1e-8 * scale, req.threads);
      res.z_nodes = ec.z_nodes;
      res.xi_nodes = static_cast<int>(rule.size());
      res.z_plan = ec.plan;
      res.refinements = level;
      if (std::isfinite(prev) && std::abs(ec.value - prev) <= refine_tol(req.eps, ec.value, scale)) {
        total += ec.value;
        err += std::abs(ec.value - prev);
        done = true;
      }
          prev = ec.value;
    }
    if (!done) throw ConvergenceError("price_european_nonsymmetric: curve quadrature refinement did not settle");
  }
  const double disc = std::pow(req.q0, req.n);
  res.price = disc * total;
  res.error_estimate = disc * err;
  return res;
}

// ---------------------------------------------------------------------------------------------
// Barrier.

namespace {

struct BarrierGeometry {
  SinhXiContour lower;  // eta contour, wings down
  SinhXiContour upper;  // xi contour, wings up
};

BarrierGeometry barrier_geometry(const LevyModel& m, const PayoffTransform& p) {
  const StripInfo st = joint_strip(m, p);
  const double mlo = m.strip_minus();
  const double vp = clamp_margin(model_centre(m), st.lo, st.hi);
  double g = std::isfinite(mlo) ? std::min(1.0, 0.5 * (vp - mlo)) : 1.0;
  double vm = vp - g;
  // Keep the origin (pole of the Wiener-Hopf kernel) away from both vertices.
  if (std::abs(vm) < 0.2 * g && (!std::isfinite(mlo) || vp - 1.4 * g > mlo)) {
    g *= 1.4;
    vm = vp - g;
  }
  const double mid = 0.5 * (vm + vp);
  const double th = 0.25 * sector_limit(m);
  const double d = 0.9 * th;
  BarrierGeometry out;
  out.upper = make_sinh(vp, th, d, fit_b(vp, th, d, mid, st.hi));
  out.lower = make_sinh(vm, -th, d, fit_b(vm, -th, d, mlo, mid));
  return out;
}

// Nodes of the knock-out correction at one contour resolution.
struct BarrierRules {
  XiRule eta, xi;
};

struct JTerms {
  const LevyModel* m;
  const PayoffTerm* term;
  double x, h;
  const BarrierGeometry* geo;
  const BarrierRules* rules;
  WHOptions wh;
};

// J(q) = (1/2pi) int e^{i(x-h) eta} Phi / ((1 - q Phi) phi^-(eta)) inner(eta) d eta,
// inner(eta) = (1/2pi) int e^{i(h-a) xi} phi^-(xi) G0(xi) / (i (eta - xi)) d xi.
cplx j_value(const JTerms& t, cplx q, std::vector<cplx>* inner_out = nullptr) {
  const LevyModel& m = *t.m;
  WHContext ctx(m, q, t.geo->lower, t.geo->upper, t.wh);
  const XiRule& re = t.rules->eta;
  const XiRule& rx = t.rules->xi;
  std::vector<cplx> B(rx.size());
  for (size_t j = 0; j < rx.size(); ++j) {
    const cplx xi = rx.xi[j];
    const cplx pm = wh_continue(ctx, xi, WHFactor::minus);
    B[j] = rx.w[j] / (2.0 * kPi) * std::exp(kI * (t.h - t.term->a) * xi) * pm * g0_at(*t.term, xi);
  }
  cplx J = 0.0;
  for (size_t k = 0; k < re.size(); ++k) {
    const cplx eta = re.xi[k];
    cplx inner = 0.0;
    for (size_t j = 0; j < rx.size(); ++j) inner += B[j] / (kI * (eta - rx.xi[j]));
    if (inner_out) inner_out->push_back(inner);
    const cplx ph = m.phi(eta);
    const cplx pm = wh_minus(ctx, eta);
    J += re.w[k] / (2.0 * kPi) * std::exp(kI * (t.x - t.h) * eta) * ph / ((1.0 - q * ph) * pm) * inner;
  }
  return J;
}

// Points where J(q) is singular: q = s / Phi(eta) (s >= 1) along both contours, plus q = 1.
std::vector<cplx> barrier_singularities(const LevyModel& m, const BarrierGeometry& g, const BarrierRules& r) {
  std::vector<cplx> out{cplx(1.0)};
  auto add_phi = [&](cplx ph) {
    if (std::abs(ph) < 1e-300) return;
    for (double s : {1.0, 1.25, 1.5, 2.0, 3.0, 5.0, 10.0, 30.0, 100.0, 1e3, 1e4, 1e6}) out.push_back(s / ph);
  };
  for (const SinhXiContour* c : {&g.lower, &g.upper}) {
    for (double y = -20.0; y <= 20.0; y += 0.05) add_phi(m.phi(chi_xi_eval(*c, y)));
  }
  for (const cplx& e : r.eta.xi) out.push_back(1.0 / m.phi(e));
  for (const cplx& e : r.xi.xi) out.push_back(1.0 / m.phi(e));
  return out;
}

double barrier_term(const PricingRequest& req, const PayoffTerm& term, PricingResult& res) {
  const LevyModel& m = req.model;
  const double h = *req.barrier;
  const PayoffTransform pt = single_term(req.payoff, term);
  const BarrierGeometry geo = barrier_geometry(m, pt);
  const double E = std::log(1.0 / req.eps);
  const double scale = payoff_scale(req.payoff);
  const int n = req.n;

  auto env_eta = [&](double y) {
    const cplx e = chi_xi_eval(geo.lower, y);
    return std::abs(std::exp(kI * (req.x - h) * e) * chi_xi_deriv(geo.lower, y)) * std::min(1.0, std::abs(m.phi(e)));
  };
  auto env_xi = [&](double y) {
    const cplx xi = chi_xi_eval(geo.upper, y);
    return std::abs(std::exp(kI * (h - term.a) * xi) * g0_at(term, xi) * chi_xi_deriv(geo.upper, y));
  };
  WHOptions wh;
  wh.eps = std::min(1e-12, 0.1 * req.eps);

  double zeta = 2.0 * kPi * std::min(geo.lower.d, geo.upper.d) / (E + 10.0);
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int r = 0; r < 6; ++r, zeta *= 0.5) {
    BarrierRules rules{sinh_rule(geo.lower, zeta, env_eta, 1e-3 * req.eps),
                       sinh_rule(geo.upper, zeta, env_xi, 1e-3 * req.eps)};
    JTerms jt{&m, &term, req.x, h, &geo, &rules, wh};

    // Spot check of the factor identity between the contours.
    {
      WHContext ctx(m, 0.5, geo.lower, geo.upper, wh);
      const cplx xi = kI * (0.5 * (geo.lower.omega1 + geo.lower.b * std::sin(geo.lower.omega) + geo.upper.omega1 +
                                   geo.upper.b * std::sin(geo.upper.omega)));
      const cplx lhs = wh_plus(ctx, xi) * wh_minus(ctx, xi);
      const cplx rhs = 0.5 / (1.0 - 0.5 * m.phi(xi));
      if (std::abs(lhs - rhs) > 1e-6 * std::abs(rhs)) {
        std::ostringstream os;
        os << "price_barrier: Wiener-Hopf identity residual " << std::abs(lhs - rhs) / std::abs(rhs) << " at xi = " << xi;
        throw ConvergenceError(os.str());
      }
    }

    double s = 1.0;
    std::vector<cplx> phis;
    for (const auto* rr : {&rules.eta, &rules.xi})
      for (const cplx& e : rr->xi) {
        phis.push_back(m.phi(e));
        s = std::max(s, std::abs(phis.back()));
      }
    TransformEvaluator V;
    V.eval = [&](const cplx& q) { return q * j_value(jt, q); };
    V.bound_kind = BoundKind::pole_at_one;
    V.radius = 1.0 / s;
    V.a_V = 0.0;
    V.gamma = sector_gamma(phis, s, n, E);
    V.real_coefficients = true;
    V.poles = relevant_poles(barrier_singularities(m, geo, rules), V.radius, n, E);
    // Scale of the bound: measured |q J(q)| dist(q, singular set) on samples around the disc.
    std::vector<cplx> probes;
    for (int k = 0; k < 8; ++k) probes.push_back(0.95 * V.radius * std::polar(1.0, (k + 0.5) * kPi / 4));
    probes.push_back(-3.0 * V.radius);
    probes.push_back(V.radius * cplx(0.5, 3.0));
    std::vector<double> cv(probes.size());
    parallel_for(static_cast<int>(probes.size()), req.threads, [&](int i) {
      const cplx q = probes[i];
      double dmin = std::numeric_limits<double>::infinity();
      for (const cplx& p : V.poles) dmin = std::min(dmin, std::abs(1.0 - q / p));
      cv[i] = std::abs(V.eval(q)) * std::min(1.0, dmin);
    });
    V.C_V = std::max(*std::max_element(cv.begin(), cv.end()), 1e-300);

    const ZRun z = z_invert(V, n, 0.1 * req.eps, req.threads);
    res.z_nodes = z.nodes;
    res.xi_nodes = static_cast<int>(rules.eta.size() + rules.xi.size());
    res.z_plan = z.plan;
    res.refinements = r;
    if (std::isfinite(prev) && std::abs(z.value - prev) <= refine_tol(req.eps, z.value, scale)) {
      res.error_estimate += std::abs(z.value - prev);
      return z.value;
    }
    prev = z.value;
  }
  throw ConvergenceError("price_barrier: contour refinement did not settle");
}

}  // namespace

PricingResult price_barrier(const PricingRequest& req) {
  check_request(req);
  if (!req.barrier) return price(req);
  const double h = *req.barrier;
  PricingResult res;
  res.method = "barrier";
  if (req.x >= h || zero_payoff(req.payoff)) return res;
  if (req.n == 0) {
    res.price = req.payoff.value(req.x);
    return res;
  }
  for (const PayoffTerm& t : req.payoff.terms) {
    if (!(t.a < h)) throw PreconditionError("price_barrier: payoff level a < h required");
  }
  if (req.n <= 7) {
    res.method = "barrier_induction";
    // Discontinuities at a and h cap the grid recursion near 1e-6; error_estimate reports what was reached.
    const InductionResult ir = oracle_barrier_induction(req.model, req.payoff, req.n, req.q0, {req.x}, h,
                                                        std::max(req.eps, 1e-5));
    res.price = ir.values.front();
    res.error_estimate = ir.error_estimate;
    return res;
  }
  if (!symmetric_model(req.model))
    throw PreconditionError("price_barrier: only models symmetric after an Esscher shift are supported");
  PricingRequest eu = req;
  eu.barrier.reset();
  const PricingResult e = price_european_symmetric(eu);
  double corr = 0.0;
  for (const PayoffTerm& t : req.payoff.terms) corr += barrier_term(req, t, res);
  const double disc = std::pow(req.q0, req.n);
  res.price = e.price - disc * corr;
  res.error_estimate = e.error_estimate + disc * res.error_estimate;
  return res;
}

PricingResult price(const PricingRequest& req) {
  if (req.barrier) return price_barrier(req);
  switch (req.mode) {
    case PricingMode::symmetric:
      return price_european_symmetric(req);
    case PricingMode::nonsymmetric:
      return price_european_nonsymmetric(req);
    case PricingMode::auto_select:
    default:
      return symmetric_model(req.model) ? price_european_symmetric(req) : price_european_nonsymmetric(req);
  }
}

Capability capability(const LevyModel& m, const PayoffTransform& p) {
  Capability c;
  std::ostringstream why;
  try {
    joint_strip(m, p);
  } catch (const PreconditionError& e) {
    c.reason = e.what();
    return c;
  }
  c.european_symmetric = symmetric_model(m);
  if (!c.european_symmetric) why << "no symmetrizing Esscher shift; ";
  try {
    curve_case(m);
    c.european_nonsymmetric = true;
  } catch (const Error& e) {
    why << e.what() << "; ";
  }
  c.barrier = c.european_symmetric;
  if (!c.barrier) why << "barrier pricing needs a symmetric model; ";
  c.reason = why.str();
  return c;
}

// ---------------------------------------------------------------------------------------------

namespace {

XiRule rule_for(const XiContour& c, int level, double X, const std::function<double(cplx, cplx)>& env, double tiny) {
  if (auto* cp = std::get_if<std::shared_ptr<const ExtendedCurve>>(&c)) {
    return curve_rule(**cp, curve_panels(**cp, X), level);
  }
  const SinhXiContour s = std::holds_alternative<FlatLine>(c) ? flat_as_sinh(std::get<FlatLine>(c))
                                                              : std::get<SinhXiContour>(c);
  const double z0 = s.zeta > 0 ? s.zeta : 0.25;
  return sinh_rule(s, z0 / (1 << level),
                   [&](double y) { return env(chi_xi_eval(s, y), chi_xi_deriv(s, y)); }, tiny);
}

}  // namespace

InnerValue inner_integral(const InnerIntegralPlan& plan, cplx q, InnerPayload payload, cplx eta) {
  InnerValue out;
  if (zero_payoff(plan.payoff)) return out;
  const LevyModel& m = plan.model;
  const double tiny = 1e-3 * plan.eps;
  const double X = 200.0;
  auto value_at = [&](int level, int& nodes) -> cplx {
    cplx total = 0.0;
    for (const PayoffTerm& term : plan.payoff.terms) {
      if (payload == InnerPayload::european) {
        auto env = [&](cplx xi, cplx dxi) {
          return std::abs(std::exp(kI * (plan.x - term.a) * xi) * term.g0(xi) * m.phi(xi) * dxi);
        };
        const XiRule r = rule_for(plan.xi_contour, level, X, env, tiny);
        nodes = static_cast<int>(r.size());
        for (size_t k = 0; k < r.size(); ++k) {
          const cplx ph = m.phi(r.xi[k]);
          total += r.w[k] / (2.0 * kPi) * std::exp(kI * (plan.x - term.a) * r.xi[k]) * term.g0(r.xi[k]) * ph /
                   (1.0 - q * ph);
        }
        continue;
      }
      if (!plan.barrier) throw PreconditionError("inner_integral: barrier payload needs a barrier level");
      const double h = *plan.barrier;
      auto envx = [&](cplx xi, cplx dxi) { return std::abs(std::exp(kI * (h - term.a) * xi) * term.g0(xi) * dxi); };
      auto enve = [&](cplx e, cplx de) {
        return std::abs(std::exp(kI * (plan.x - h) * e) * de) * std::min(1.0, std::abs(m.phi(e)));
      };
      const XiRule rx = rule_for(plan.xi_contour, level, X, envx, tiny);
      auto to_wh = [](const XiContour& c) -> WHContour {
        if (auto* f = std::get_if<FlatLine>(&c)) return *f;
        if (auto* s = std::get_if<SinhXiContour>(&c)) return *s;
        return std::get<std::shared_ptr<const ExtendedCurve>>(c);
      };
      WHContext ctx(m, q, to_wh(plan.eta_contour), to_wh(plan.xi_contour));
      std::vector<cplx> B(rx.size());
      for (size_t j = 0; j < rx.size(); ++j) {
        const cplx xi = rx.xi[j];
        B[j] = rx.w[j] / (2.0 * kPi) * std::exp(kI * (h - term.a) * xi) * wh_continue(ctx, xi, WHFactor::minus) *
               term.g0(xi);
      }
      auto inner_at = [&](cplx e) {
        cplx s = 0.0;
        for (size_t j = 0; j < rx.size(); ++j) s += B[j] / (kI * (e - rx.xi[j]));
        return s;
      };
      if (payload == InnerPayload::barrier_xi) {
        nodes = static_cast<int>(rx.size());
        total += inner_at(eta);
        continue;
      }
      const XiRule re = rule_for(plan.eta_contour, level, X, enve, tiny);
      nodes = static_cast<int>(rx.size() + re.size());
      for (size_t k = 0; k < re.size(); ++k) {
        const cplx e = re.xi[k];
        const cplx ph = m.phi(e);
        total += re.w[k] / (2.0 * kPi) * std::exp(kI * (plan.x - h) * e) * ph /
                 ((1.0 - q * ph) * wh_minus(ctx, e)) * inner_at(e);
      }
    }
    return total;
  };
  int nodes = 0;
  cplx prev = value_at(0, nodes);
  for (int L = 1; L <= plan.max_doublings; ++L) {
    const cplx cur = value_at(L, nodes);
    if (std::abs(cur - prev) <= plan.eps * std::max(1.0, std::abs(cur))) {
      out.value = cur;
      out.error = std::abs(cur - prev);
      out.nodes = nodes;
      return out;
    }
    prev = cur;
  }
  throw ConvergenceError("inner_integral: no convergence after node doublings");
}

}  // namespace sinhz
