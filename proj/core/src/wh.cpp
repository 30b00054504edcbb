#include "sinhz/wh.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "sinhz/errors.hpp"

namespace sinhz {

namespace {

constexpr double kTailTiny = 1e-18;
constexpr double kMaxY = 45.0;

SinhXiContour as_sinh(const FlatLine& f) {
  SinhXiContour c;
  c.omega1 = f.omega;
  c.b = std::abs(f.omega);
  c.omega = 0.0;
  return c;
}

cplx kernel(cplx eta, cplx xi) { return xi / (eta * (xi - eta)); }

// End value of a curve beyond its traced range: continued horizontally.
cplx curve_point(const ExtendedCurve& c, double t) {
  const double X = c.x_max();
  if (c.flatten_at() || std::abs(t) <= X) return c.point(t);
  return {t, c.point(std::copysign(X, t)).imag()};
}

cplx curve_deriv(const ExtendedCurve& c, double t) {
  if (c.flatten_at() || std::abs(t) <= c.x_max()) return c.deriv(t);
  return {1.0, 0.0};
}

}  // namespace

double contour_height(const WHContour& c, double x) {
  if (auto* f = std::get_if<FlatLine>(&c)) return f->omega;
  if (auto* s = std::get_if<SinhXiContour>(&c)) {
    const double cw = std::cos(s->omega);
    return s->omega1 + std::sin(s->omega) * std::sqrt(s->b * s->b + x * x / (cw * cw));
  }
  return curve_point(*std::get<std::shared_ptr<const ExtendedCurve>>(c), x).imag();
}

bool contour_above_origin(const WHContour& c) { return contour_height(c, 0.0) > 0.0; }

namespace detail {

WHGrid::WHGrid(const LevyModel& m, cplx q, WHContour c, const WHOptions& opt)
    : model_(m), q_(q), contour_(std::move(c)), opt_(opt) {
  if (auto* f = std::get_if<FlatLine>(&contour_)) {
    if (f->omega == 0.0) throw PreconditionError("WH contour: flat line through the origin");
    if (!(f->omega > m.strip_minus() && f->omega < m.strip_plus()))
      throw DomainError("WH contour: flat line outside the analyticity strip");
  }
  above_origin_ = contour_above_origin(contour_);
  if (std::abs(contour_height(contour_, 0.0)) < 1e-10)
    throw PreconditionError("WH contour passes through the origin");

  // Branch guard: principal log of 1 - q Phi must not jump between neighbouring samples.
  double prev_arg = 0.0;
  bool have_prev = false;
  auto guard = [&](cplx eta) {
    const cplx w = 1.0 - q_ * model_.phi(eta);
    if (w.real() <= 0.0 && std::abs(w.imag()) <= 1e-14 * std::abs(w)) {
      std::ostringstream os;
      os << "WH contour: 1 - q Phi(eta) on (-inf, 0] at eta = " << eta;
      throw DomainError(os.str());
    }
    const double a = std::arg(w);
    if (have_prev && std::abs(a - prev_arg) > 0.5 * kPi) {
      std::ostringstream os;
      os << "WH contour: branch discontinuity of log(1 - q Phi) near eta = " << eta;
      throw DomainError(os.str());
    }
    prev_arg = a;
    have_prev = true;
  };

  if (auto* cp = std::get_if<std::shared_ptr<const ExtendedCurve>>(&contour_)) {
    const ExtendedCurve& cv = **cp;
    std::vector<double> right;
    for (const auto& s : cv.samples())
      if (s.t > 0 && (!cv.flatten_at() || s.t <= *cv.flatten_at())) right.push_back(s.t);
    // Horizontal continuation until the integrand is negligible on both sides.
    double t = right.empty() ? 1.0 : right.back();
    int quiet = 0;
    while (quiet < 3) {
      t = 1.25 * t + 1.0;
      if (t > 1e12) throw ConvergenceError("WH contour: Phi does not decay along the curve");
      right.push_back(t);
      const double m1 = std::abs(weight_f(curve_point(cv, t))) * std::abs(curve_deriv(cv, t)) / std::max(1.0, t);
      const double m2 = std::abs(weight_f(curve_point(cv, -t))) / std::max(1.0, t);
      quiet = (m1 < kTailTiny && m2 < kTailTiny) ? quiet + 1 : 0;
    }
    for (auto it = right.rbegin(); it != right.rend(); ++it) panels_.push_back(-*it);
    panels_.push_back(0.0);
    panels_.insert(panels_.end(), right.begin(), right.end());
    const GaussRule& g = gauss_legendre(opt_.gl_order);
    for (size_t k = 0; k + 1 < panels_.size(); ++k) {
      const double a = panels_[k], b = panels_[k + 1];
      for (double xg : g.x) guard(curve_point(cv, 0.5 * (a + b) + 0.5 * (b - a) * xg));
    }
  } else {
    const SinhXiContour s = std::holds_alternative<FlatLine>(contour_) ? as_sinh(std::get<FlatLine>(contour_))
                                                                        : std::get<SinhXiContour>(contour_);
    const double dy = 0.25 * opt_.zeta0;
    auto mag = [&](double y) {
      const cplx eta = chi_xi_eval(s, y);
      return std::abs(weight_f(eta)) * std::abs(chi_xi_deriv(s, y)) / std::max(1.0, std::abs(eta));
    };
    auto reach = [&](double sign) {
      double y = 0.0;
      int quiet = 0;
      while (quiet < 8) {
        y += sign * dy;
        if (std::abs(y) > kMaxY) throw ConvergenceError("WH contour: integrand does not decay within |y| <= 45");
        quiet = mag(y) < kTailTiny ? quiet + 1 : 0;
      }
      return y;
    };
    y_lo_ = reach(-1.0);
    y_hi_ = reach(1.0);
    for (double y = y_lo_; y <= y_hi_; y += dy) guard(chi_xi_eval(s, y));
  }
}

cplx WHGrid::weight_f(cplx eta) const {
  const cplx qp = q_ * model_.phi(eta);
  return -log1pc(-qp);
}

std::vector<WHNode> WHGrid::build(int L) const {
  std::vector<WHNode> out;
  if (auto* cp = std::get_if<std::shared_ptr<const ExtendedCurve>>(&contour_)) {
    const ExtendedCurve& cv = **cp;
    const GaussRule& g = gauss_legendre(opt_.gl_order);
    const int split = 1 << L;
    for (size_t k = 0; k + 1 < panels_.size(); ++k) {
      const double h = (panels_[k + 1] - panels_[k]) / split;
      for (int j = 0; j < split; ++j) {
        const double a = panels_[k] + j * h;
        for (size_t i = 0; i < g.x.size(); ++i) {
          const double t = a + 0.5 * h * (1.0 + g.x[i]);
          const cplx eta = curve_point(cv, t);
          out.push_back({eta, 0.5 * h * g.w[i] * curve_deriv(cv, t) * weight_f(eta)});
        }
      }
    }
    return out;
  }
  const SinhXiContour s = std::holds_alternative<FlatLine>(contour_) ? as_sinh(std::get<FlatLine>(contour_))
                                                                      : std::get<SinhXiContour>(contour_);
  const double z = opt_.zeta0 / (1 << L);
  const long klo = static_cast<long>(std::floor(y_lo_ / z)), khi = static_cast<long>(std::ceil(y_hi_ / z));
  out.reserve(static_cast<size_t>(khi - klo + 1));
  for (long k = klo; k <= khi; ++k) {
    const double y = k * z;
    const cplx eta = chi_xi_eval(s, y);
    out.push_back({eta, z * chi_xi_deriv(s, y) * weight_f(eta)});
  }
  return out;
}

namespace {

template <class Sum>
cplx refine(Sum&& sum, const WHOptions& opt, cplx xi) {
  cplx prev = sum(0);
  // Absolute accuracy of the exponent is relative accuracy of the factor (after division by 2 pi).
  const double tol = 2.0 * kPi * opt.eps / 10.0;
  for (int L = 1; L <= opt.max_level; ++L) {
    const cplx cur = sum(L);
    if (std::abs(cur - prev) <= tol) return cur;
    prev = cur;
  }
  std::ostringstream os;
  os << "WH quadrature did not converge at xi = " << xi;
  throw ConvergenceError(os.str());
}

}  // namespace

cplx WHGrid::integral(cplx xi) const {
  if (!std::holds_alternative<FlatLine>(contour_)) {
    return refine(
        [&](int L) {
          cplx s = 0.0;
          for (const WHNode& n : level(L)) s += n.wf * kernel(n.eta, xi);
          return s;
        },
        opt_, xi);
  }
  // K = 1/eta + 1/(xi - eta): the first part peaks at the origin, the second at xi.
  std::call_once(origin_once_, [&] {
    origin_part_ = refine(
        [&](int L) {
          cplx s = 0.0;
          for (const WHNode& n : level(L)) s += n.wf / n.eta;
          return s;
        },
        opt_, cplx(0.0));
  });
  const double w = std::get<FlatLine>(contour_).omega;
  const double b = std::abs(xi.imag() - w);
  auto eta_at = [&](double y) { return cplx(xi.real() + b * std::sinh(y), w); };
  auto mag = [&](double y) {
    const cplx eta = eta_at(y);
    return std::abs(weight_f(eta)) * b * std::cosh(y) / std::max(1.0, std::abs(xi - eta));
  };
  auto reach = [&](double sign) {
    double y = 0.0;
    int quiet = 0;
    while (quiet < 8) {
      y += sign * 0.25 * opt_.zeta0;
      if (std::abs(y) > kMaxY) throw ConvergenceError("WH contour: integrand does not decay within |y| <= 45");
      quiet = mag(y) < kTailTiny ? quiet + 1 : 0;
    }
    return y;
  };
  const double ylo = reach(-1.0), yhi = reach(1.0);
  const cplx near = refine(
      [&](int L) {
        const double z = opt_.zeta0 / (1 << L);
        cplx s = 0.0;
        for (long k = static_cast<long>(std::floor(ylo / z)); k <= static_cast<long>(std::ceil(yhi / z)); ++k) {
          const double y = k * z;
          const cplx eta = eta_at(y);
          s += z * b * std::cosh(y) * weight_f(eta) / (xi - eta);
        }
        return s;
      },
      opt_, xi);
  return origin_part_ + near;
}

const std::vector<WHNode>& WHGrid::level(int L) const {
  std::lock_guard<std::mutex> lock(mu_);
  if (static_cast<int>(levels_.size()) <= L) levels_.resize(L + 1);
  if (!levels_[L]) levels_[L] = std::make_unique<std::vector<WHNode>>(build(L));
  return *levels_[L];
}

}  // namespace detail

WHContext::WHContext(const LevyModel& m, cplx q, WHContour minus, WHContour plus, WHOptions opt)
    : model_(m), q_(q), opt_(opt) {
  minus_ = std::make_unique<detail::WHGrid>(m, q, std::move(minus), opt);
  plus_ = std::make_unique<detail::WHGrid>(m, q, std::move(plus), opt);
}

cplx wh_plus(const WHContext& ctx, cplx xi) {
  const auto& g = ctx.grid_minus();
  if (!(xi.imag() > contour_height(g.contour(), xi.real())))
    throw DomainError("wh_plus: xi must lie strictly above the minus contour");
  if (xi == cplx(0.0) || ctx.q() == cplx(0.0)) return 1.0;
  const cplx S = g.integral(xi);
  const cplx pre = g.above_origin() ? 1.0 - ctx.q() : cplx(1.0);
  return pre * std::exp(-S / (2.0 * kPi * kI));
}

cplx wh_minus(const WHContext& ctx, cplx xi) {
  const auto& g = ctx.grid_plus();
  if (!(xi.imag() < contour_height(g.contour(), xi.real())))
    throw DomainError("wh_minus: xi must lie strictly below the plus contour");
  if (xi == cplx(0.0) || ctx.q() == cplx(0.0)) return 1.0;
  const cplx S = g.integral(xi);
  const cplx pre = g.above_origin() ? cplx(1.0) : 1.0 - ctx.q();
  return pre * std::exp(S / (2.0 * kPi * kI));
}

cplx wh_continue(const WHContext& ctx, cplx xi, WHFactor which) {
  if (ctx.q() == cplx(0.0)) return 1.0;
  const cplx den = 1.0 - ctx.q() * ctx.model().phi(xi);
  if (std::abs(den) < 1e-12) throw PoleError("wh_continue: 1 - q Phi(xi) vanishes");
  const cplx other = which == WHFactor::plus ? wh_minus(ctx, xi) : wh_plus(ctx, xi);
  return (1.0 - ctx.q()) / (den * other);
}

std::pair<cplx, cplx> wh_vp_line(const LevyModel& m, double q, cplx xi, double tol) {
  if (!(q >= 0.0 && q < 1.0)) throw PreconditionError("wh_vp_line: q in [0, 1) required");
  if (q == 0.0) return {1.0, 1.0};
  const double w = xi.imag(), s = xi.real();
  const double lq = std::log1p(-q);
  auto L = [&](cplx eta) { return lq - log1pc(-q * m.phi(eta)); };
  auto h = [&](double t) -> cplx {
    const cplx eta(t, w);
    if (std::abs(eta) < 1e-12) return xi * (-q * m.dpsi(eta)) / (1.0 - q);
    return xi * L(eta) / eta;
  };
  // v.p. integral folded about xi: the pole's residue cancels between t = s - tau and s + tau.
  auto fr = [&](double tau) { return tau == 0.0 ? 0.0 : ((h(s - tau) - h(s + tau)) / tau).real(); };
  auto fi = [&](double tau) { return tau == 0.0 ? 0.0 : ((h(s - tau) - h(s + tau)) / tau).imag(); };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double inf = std::numeric_limits<double>::infinity();
  const double pr = GK::integrate(fr, 0.0, inf, 20, tol);
  const double pi = GK::integrate(fi, 0.0, inf, 20, tol);
  const cplx pv(pr, pi);
  const cplx root = std::sqrt((1.0 - q) / (1.0 - q * m.phi(xi)));
  const cplx e = pv / (2.0 * kPi * kI);
  return {root * std::exp(-e), root * std::exp(e)};
}

}  // namespace sinhz
