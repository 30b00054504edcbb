#include "sinhz_tools/suites.hpp"

#include <algorithm>
#include <boost/multiprecision/complex128.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "sinhz/errors.hpp"
#include "sinhz/levelcurves.hpp"
#include "sinhz/pricing.hpp"
#include "sinhz/wh.hpp"
#include "sinhz/zinv.hpp"

namespace sinhz::tools {

namespace {

using qreal = boost::multiprecision::float128;
using qcplx = boost::multiprecision::complex128;

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel_err(double got, double want) { return std::abs(got - want) / std::max(std::abs(want), 1e-300); }

LevyModel kobol_symmetric(double c = 0.3) {
  KoBoLParams k;
  k.c_plus = k.c_minus = c;
  k.nu_plus = k.nu_minus = 0.5;
  k.lambda_minus = -8.0;
  k.lambda_plus = 8.0;
  return LevyModel::kobol(k);
}

LevyModel nig_skewed() {
  NTSParams p;
  p.alpha_s = 2.0;
  p.beta_s = 0.5;
  p.delta_s = 1.0;
  return LevyModel::nts(p);
}

// ------------------------------------------------------------------------------------------
// Curated transforms in both precisions.

struct Curated {
  TransformInfo info;
  std::function<qcplx(const qcplx&)> eval_q;
  std::function<cplx(const cplx&)> eval_d;
  std::function<cplx(const cplx&)> log_eval_d;
};

Curated curated(SeriesKind kind) {
  Curated c;
  switch (kind) {
    case SeriesKind::geometric:
      c.info.radius = 2.0;  // rho = 1/2
      c.eval_q = [](const qcplx& q) { return qcplx(1) / (qcplx(1) - q / qreal(2)); };
      c.eval_d = [](const cplx& q) { return 1.0 / (1.0 - 0.5 * q); };
      break;
    case SeriesKind::exponential:
      c.info.bound_kind = BoundKind::entire;
      c.eval_q = [](const qcplx& q) { return exp(q); };
      c.eval_d = [](const cplx& q) { return std::exp(q); };
      c.log_eval_d = [](const cplx& q) { return q; };
      break;
    case SeriesKind::partial_fraction:
      c.info.poles = {cplx(1.0), cplx(3.0)};
      c.eval_q = [](const qcplx& q) { return qcplx(1) / ((qcplx(1) - q) * (qcplx(1) - q / qreal(3))); };
      c.eval_d = [](const cplx& q) { return 1.0 / ((1.0 - q) * (1.0 - q / 3.0)); };
      c.info.C_V = 1.5;
      break;
    case SeriesKind::pole_at_one:
      c.eval_q = [](const qcplx& q) { return qcplx(1) / (qcplx(1) - q); };
      c.eval_d = [](const cplx& q) { return 1.0 / (1.0 - q); };
      break;
  }
  return c;
}

// Relative error of sum_j exp(lw_j) V(q_j) R^{-n} against the exact coefficient, in quad precision.
// Returns partial sums when `partial` is set (nodes in order, real part taken when `real_part`).
double quad_rel_error(const Curated& c, const std::vector<ZNode<qcplx>>& nodes, double radius, int n,
                      const ExactCoefficient& exact, bool real_part, std::vector<qreal>* partial = nullptr) {
  const qreal shift = qreal(exact.log_abs) + qreal(n) * log(qreal(radius));
  qcplx acc(0);
  for (const auto& nd : nodes) {
    acc += exp(nd.log_weight - qcplx(shift)) * c.eval_q(nd.q);
    if (partial) partial->push_back(real_part ? acc.real() : abs(acc));
  }
  const qreal got = real_part ? acc.real() : abs(acc);
  return static_cast<double>(abs(got - qreal(exact.sign)));
}

TrapPlan trap_with_N(double eps, int n, double M, int N) {
  TrapPlan p = choose_trap_params(eps, n, M);
  p.N = N;
  return p;
}

double trap_error(const Curated& c, int n, double eps, double M, int N, const ExactCoefficient& ex) {
  const TrapPlan p = trap_with_N(eps, n, M, N);
  const auto nodes = trapezoid_nodes<qcplx>(c.info, n, p);
  return quad_rel_error(c, nodes, effective_radius(c.info, n), n, ex, c.info.real_coefficients);
}

// Smallest N meeting eps, found by doubling then bisection and confirmed at N and N - 1.
int measure_trap(const Curated& c, int n, double eps, double M, const ExactCoefficient& ex) {
  int hi = 8;
  while (trap_error(c, n, eps, M, hi, ex) > eps) {
    hi *= 2;
    if (hi > (1 << 22)) throw ConvergenceError("trapezoid never meets eps");
  }
  int lo = hi / 2;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    (trap_error(c, n, eps, M, mid, ex) <= eps ? hi : lo) = mid;
  }
  // Aliasing error is not monotone for N <= n; walk down while the rule still passes.
  while (hi > 1 && trap_error(c, n, eps, M, hi - 1, ex) <= eps) --hi;
  return hi;
}

// Minimal number of half-sum terms over a zeta scan with the planned contour shape.
int measure_sinh(const Curated& c, const SinhPlan& plan, int n, double eps, const ExactCoefficient& ex) {
  int best = std::numeric_limits<int>::max();
  for (double s = 1.0; s <= 6.0 + 1e-12; s += 0.05) {
    SinhPlan p = plan;
    p.contour.zeta = plan.contour.zeta * s;
    p.contour.N = static_cast<int>(std::ceil(1.5 * plan.contour.Lambda / p.contour.zeta)) + 4;
    p.half_sum = c.info.real_coefficients;
    std::vector<qreal> partial;
    const auto nodes = sinh_nodes<qcplx>(p, n);
    quad_rel_error(c, nodes, p.radius, n, ex, p.half_sum, &partial);
    // First index after which every partial sum stays within eps.
    int k = static_cast<int>(partial.size());
    while (k > 0 && static_cast<double>(abs(partial[k - 1] - qreal(ex.sign))) <= eps) --k;
    if (k == static_cast<int>(partial.size())) continue;
    best = std::min(best, k + 1);
  }
  if (best == std::numeric_limits<int>::max()) throw ConvergenceError("sinh rule never meets eps");
  return best;
}

// ------------------------------------------------------------------------------------------

CheckResult timed(int id, const char* name, const std::function<void(CheckResult&)>& body) {
  CheckResult r;
  r.criterion = id;
  r.name = name;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail += std::string(r.detail.empty() ? "" : "; ") + "exception: " + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

void gain(CheckResult& r) {
  struct Row {
    int n;
    double want, tol;
  };
  bool ok = true;
  for (const Row& row : {Row{1260, 13.7, 0.5}, Row{3780, 32.0, 1.0}, Row{7560, 57.0, 1.0}}) {
    const double K = gain_factor(1e-15, row.n, 23.0);
    ok = ok && std::abs(K - row.want) <= row.tol;
    r.detail += fmt("n=%d K=%.3f (want %.1f+-%.1f) ", row.n, K, row.want, row.tol);
  }
  r.pass = ok;
}

void complexity(CheckResult& r) {
  const ComplexityRow row = complexity_row(SeriesKind::pole_at_one, 1260, 23.0, 1e-15);
  const double rt = static_cast<double>(row.N_trap_measured) / row.N_trap_predicted;
  const double rs = static_cast<double>(row.N_sinh_measured) / row.N_sinh_predicted;
  const bool t_ok = rt >= 0.5 && rt <= 2.0;
  const bool s_ok = rs >= 0.5 && rs <= 2.0;
  const bool k_ok = row.K_measured >= 10.0;
  r.pass = t_ok && s_ok && k_ok;
  r.detail = fmt("trap measured %d vs predicted %d (x%.2f, %s); sinh measured %d vs predicted %d (x%.2f, %s); "
                 "measured ratio %.1f (%s)",
                 row.N_trap_measured, row.N_trap_predicted, rt, t_ok ? "ok" : "outside factor 2", row.N_sinh_measured,
                 row.N_sinh_predicted, rs, s_ok ? "ok" : "outside factor 2", row.K_measured, k_ok ? "ok" : "< 10");
}

void zinv_accuracy(CheckResult& r) {
  double worst = 0.0;
  std::string where;
  const double eps = 1e-13;
  for (SeriesKind k : {SeriesKind::geometric, SeriesKind::exponential, SeriesKind::pole_at_one,
                       SeriesKind::partial_fraction}) {
    const Curated c = curated(k);
    TransformEvaluator V;
    static_cast<TransformInfo&>(V) = c.info;
    V.eval = c.eval_d;
    if (c.log_eval_d) V.log_eval = c.log_eval_d;
    for (int n : {10, 100, 1260, 3780}) {
      const SinhPlan p = choose_sinh_params(V, eps, n, auto_M(eps));
      const ScaledValue<cplx> v = invert_sinh(V, n, p);
      const ExactCoefficient ex = oracle_zinv_series(k, n);
      // Compare in log form so 1/3780! and 2^-3780 stay representable.
      const long double lr = v.log_abs() - ex.log_abs;
      const double sgn = v.mantissa.real() >= 0 ? 1.0 : -1.0;
      const double e = std::abs(sgn * ex.sign * std::exp(static_cast<double>(lr)) - 1.0);
      if (e > worst) {
        worst = e;
        where = fmt("kind=%d n=%d", static_cast<int>(k), n);
      }
    }
  }
  r.pass = worst <= 1e-12;
  r.detail = fmt("max rel err %.2e at %s over 4 transforms x n in {10,100,1260,3780}", worst, where.c_str());
}

void hardy(CheckResult& r) {
  const double v = oracle_hardy_numeric(1.0 - 1e-6);
  const double ratio = v / (-2.0 * std::log(1e-6));
  r.pass = ratio >= 0.95 && ratio <= 1.05;
  r.detail = fmt("H=%.6f ratio=%.4f (window [0.95, 1.05])", v, ratio);
}

void wh_identity(CheckResult& r, int threads) {
  struct Case {
    LevyModel m;
    double centre;
  };
  std::vector<Case> cases{{kobol_symmetric(), 0.0}, {nig_skewed(), 0.5}};
  const std::vector<cplx> qs{0.1, 0.5, 0.9, cplx(0.3, 0.3)};
  std::vector<double> worst(cases.size() * qs.size(), 0.0);
  parallel_for(static_cast<int>(worst.size()), threads, [&](int idx) {
    const Case& c = cases[idx / qs.size()];
    const cplx q = qs[idx % qs.size()];
    WHContext ctx(c.m, q, FlatLine{c.centre - 0.45}, FlatLine{c.centre + 0.45});
    for (int j = 0; j < 41; ++j) {
      const cplx xi(-20.0 + j, c.centre + 0.1);
      const cplx lhs = wh_plus(ctx, xi) * wh_minus(ctx, xi);
      const cplx rhs = (1.0 - q) / (1.0 - q * c.m.phi(xi));
      worst[idx] = std::max(worst[idx], std::abs(lhs - rhs));
    }
  });
  const double w = *std::max_element(worst.begin(), worst.end());
  r.pass = w <= 1e-9;
  r.detail = fmt("max |phi+ phi- - (1-q)/(1-q Phi)| = %.2e over 2 models x 4 q x 41 xi", w);
}

void european_symmetric(CheckResult& r, int threads) {
  const LevyModel m = kobol_symmetric();
  double worst = 0.0;
  for (const auto& [p, name] : {std::pair{make_put(1.0), "put"}, std::pair{make_digital_down(0.05), "digital"}}) {
    for (int n : {12, 252}) {
      PricingRequest req(m, p);
      req.n = n;
      req.x = 0.1;
      req.eps = 1e-12;
      req.threads = threads;
      const double got = price_european_symmetric(req).price;
      const double want = oracle_european_direct(m, p, n, 1.0, req.x, 1e-14);
      const double e = rel_err(got, want);
      worst = std::max(worst, e);
      r.detail += fmt("%s n=%d %.12g rel %.1e; ", name, n, got, e);
    }
  }
  r.pass = worst <= 1e-8;
}

void european_nonsymmetric(CheckResult& r, int threads) {
  const LevyModel m = nig_skewed();
  double worst = 0.0;
  for (int n : {12, 252}) {
    PricingRequest req(m, make_put(1.0));
    req.n = n;
    req.x = 0.0;
    req.eps = 1e-10;
    req.threads = threads;
    const double got = price_european_nonsymmetric(req).price;
    const double want = oracle_european_direct(m, req.payoff, n, 1.0, req.x, 1e-14);
    const double e = rel_err(got, want);
    worst = std::max(worst, e);
    r.detail += fmt("put n=%d %.12g rel %.1e; ", n, got, e);
  }
  r.pass = worst <= 1e-6;
}

void barrier(CheckResult& r, int threads) {
  const LevyModel m = kobol_symmetric();
  const PayoffTransform p = make_digital_down(0.05);
  double worst = 0.0;
  for (int n : {8, 12, 16}) {
    PricingRequest req(m, p);
    req.n = n;
    req.barrier = 0.3;
    req.eps = 1e-9;
    req.threads = threads;
    const double got = price_barrier(req).price;
    const double want = oracle_barrier_induction(m, p, n, 1.0, {req.x}, 0.3, 1e-5).values.front();
    const double e = rel_err(got, want);
    worst = std::max(worst, e);
    r.detail += fmt("n=%d %.10g vs %.10g rel %.1e; ", n, got, want, e);
  }
  PricingRequest far(m, p);
  far.n = 12;
  far.barrier = 60.0;
  far.eps = 1e-10;
  far.threads = threads;
  const double b = price_barrier(far).price;
  far.barrier.reset();
  const double eu = price_european_symmetric(far).price;
  const double ce = std::abs(b - eu);
  r.detail += fmt("h=x+60 |barrier - european| = %.1e", ce);
  r.pass = worst <= 1e-4 && ce <= 1e-6;
}

void levelcurves(CheckResult& r) {
  const LevyModel mk = kobol_symmetric();
  const double delta = 0.05;
  const ExtendedCurve ck = build_extended_curve(mk, delta, 0.0, 1e4);
  double res = 0.0;
  for (const auto& s : ck.samples())
    if (std::abs(s.t) >= ck.x_connect()) res = std::max(res, std::abs(ck.level_residual(mk, s)));
  // Least-squares fit of log y against log x on the far wing.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int k = 0;
  for (const auto& s : ck.samples()) {
    if (s.t < 100.0 || s.t > 1e4) continue;
    const double X = std::log(s.t), Y = std::log(s.point.imag());
    sx += X;
    sy += Y;
    sxx += X * X;
    sxy += X * Y;
    ++k;
  }
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  const double pref = std::exp((sy - slope * sx) / k);
  const Asymptotics& as = asymptotic_params(mk);
  const double want_slope = as.nu_bar + 1.0 - as.nu0;
  const double want_pref = p_delta(mk, delta);

  const LevyModel mq = LevyModel::quadratic(QuadraticParams{});
  const double dq = 0.3;
  const ExtendedCurve cq = build_extended_curve(mq, dq, -0.5, 50.0);
  double hyp = 0.0;
  for (const auto& s : cq.samples())
    if (s.t >= cq.x_connect()) hyp = std::max(hyp, std::abs(s.point.imag() - dq / (2.0 * s.t)));

  const bool ok_res = res <= 1e-9;
  const bool ok_slope = std::abs(slope / want_slope - 1.0) <= 0.05;
  const bool ok_pref = std::abs(pref / want_pref - 1.0) <= 0.10;
  const bool ok_hyp = hyp <= 1e-10;
  r.pass = ok_res && ok_slope && ok_pref && ok_hyp;
  r.detail = fmt("residual %.1e; exponent %.4f vs %.4f; prefactor %.4f vs %.4f; quadratic hyperbola err %.1e", res,
                 slope, want_slope, pref, want_pref, hyp);
}

void invariants(CheckResult& r, int threads) {
  const LevyModel mk = kobol_symmetric();
  const int n = 12;
  PricingRequest req(mk, make_put(1.0));
  req.n = n;
  req.x = 0.1;
  req.eps = 1e-12;
  req.threads = threads;
  const double v1 = price_european_symmetric(req).price;
  req.q0 = 0.97;
  const double vq = price_european_symmetric(req).price;
  const double disc = std::abs(vq / (std::pow(0.97, n) * v1) - 1.0);

  // Esscher consistency: E[G(x + X_n)] = Phi(-i beta)^n e^{beta x} E_beta[(e^{-beta .} G)(x + X_n)].
  const LevyModel nig = nig_skewed();
  const double beta = *nig.symmetrizing_beta();
  PricingRequest rn(nig, make_put(1.0));
  rn.n = n;
  rn.x = 0.1;
  rn.eps = 1e-12;
  rn.threads = threads;
  const double direct = price_european_nonsymmetric(rn).price;
  PricingRequest rs(esscher(nig, EsscherShift{beta}), esscher_payoff(make_put(1.0), beta));
  rs.n = n;
  rs.x = 0.1;
  rs.eps = 1e-12;
  rs.threads = threads;
  const double shifted = price_european_symmetric(rs).price;
  const double scale = std::pow(std::abs(nig.phi(cplx(0.0, -beta))), n) * std::exp(beta * rs.x);
  const double ess = rel_err(scale * shifted, direct);

  // Contour independence: sinh contour versus level curve for the same symmetric model.
  req.q0 = 1.0;
  const double viaCurve = price_european_nonsymmetric(req).price;
  const double ci = rel_err(viaCurve, v1);

  r.pass = disc <= 1e-13 && ess <= 1e-9 && ci <= 1e-9;
  r.detail = fmt("discount scaling %.1e; Esscher consistency %.1e; contour independence %.1e", disc, ess, ci);
}

}  // namespace

// ------------------------------------------------------------------------------------------

SeriesKind series_kind_from_name(const std::string& s) {
  static const std::map<std::string, SeriesKind> names{{"geometric", SeriesKind::geometric},
                                                       {"exponential", SeriesKind::exponential},
                                                       {"partial_fraction", SeriesKind::partial_fraction},
                                                       {"pole_at_one", SeriesKind::pole_at_one}};
  auto it = names.find(s);
  if (it == names.end()) throw PreconditionError("unknown transform '" + s + "'");
  return it->second;
}

ComplexityRow complexity_row(SeriesKind kind, int n, double M, double eps) {
  const Curated c = curated(kind);
  const ExactCoefficient ex = oracle_zinv_series(kind, n);
  ComplexityRow row;
  row.n = n;
  row.M = M;
  row.eps = eps;
  const TrapPlan tp = choose_trap_params(eps, n, M);
  row.N_trap_predicted = static_cast<int>(std::lround(tp.N_approx));
  const SinhPlan sp = choose_sinh_params(c.info, eps, n, M);
  row.N_sinh_predicted = sp.predicted_terms;
  row.K_predicted = gain_factor(eps, n, M);
  row.err_trap = trap_error(c, n, eps, M, tp.N, ex);
  {
    SinhPlan p = sp;
    p.half_sum = c.info.real_coefficients;
    row.err_sinh = quad_rel_error(c, sinh_nodes<qcplx>(p, n), p.radius, n, ex, p.half_sum);
  }
  row.N_trap_measured = measure_trap(c, n, eps, M, ex);
  row.N_sinh_measured = measure_sinh(c, sp, n, eps, ex);
  row.K_measured = static_cast<double>(row.N_trap_measured) / row.N_sinh_measured;
  return row;
}

const char* complexity_csv_header() {
  return "n,M,eps,N_trap_predicted,N_trap_measured,N_sinh_predicted,N_sinh_measured,K_predicted,K_measured,"
         "err_trap,err_sinh";
}

std::string complexity_csv_line(const ComplexityRow& r) {
  return fmt("%d,%.17g,%.17g,%d,%d,%d,%d,%.17g,%.17g,%.17g,%.17g", r.n, r.M, r.eps, r.N_trap_predicted,
             r.N_trap_measured, r.N_sinh_predicted, r.N_sinh_measured, r.K_predicted, r.K_measured, r.err_trap,
             r.err_sinh);
}

CheckResult run_criterion(int id, int threads) {
  switch (id) {
    case 1:
      return timed(1, "gain factor", gain);
    case 2:
      return timed(2, "complexity", complexity);
    case 3:
      return timed(3, "z-inversion accuracy", zinv_accuracy);
    case 4:
      return timed(4, "hardy asymptotic", hardy);
    case 5:
      return timed(5, "wiener-hopf identity", [&](CheckResult& r) { wh_identity(r, threads); });
    case 6:
      return timed(6, "european symmetric", [&](CheckResult& r) { european_symmetric(r, threads); });
    case 7:
      return timed(7, "european non-symmetric", [&](CheckResult& r) { european_nonsymmetric(r, threads); });
    case 8:
      return timed(8, "barrier", [&](CheckResult& r) { barrier(r, threads); });
    case 9:
      return timed(9, "level curves", levelcurves);
    case 10:
      return timed(10, "structural invariants", [&](CheckResult& r) { invariants(r, threads); });
    default:
      throw PreconditionError(fmt("no criterion %d", id));
  }
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"gain",    "complexity",   "zinv",        "hardy",
                                              "wh-identity", "european-symmetric", "european-nonsymmetric",
                                              "barrier", "levelcurves", "invariants",  "all"};
  return names;
}

std::vector<CheckResult> run_suite(const std::string& name, int threads) {
  const auto& names = suite_names();
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw PreconditionError("unknown suite '" + name + "'");
  std::vector<CheckResult> out;
  if (name == "all") {
    for (int id = 1; id <= 10; ++id) out.push_back(run_criterion(id, threads));
  } else {
    out.push_back(run_criterion(static_cast<int>(it - names.begin()) + 1, threads));
  }
  return out;
}

}  // namespace sinhz::tools
