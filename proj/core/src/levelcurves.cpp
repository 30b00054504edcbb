#include "sinhz/levelcurves.hpp"

#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include "sinhz/errors.hpp"

namespace sinhz {

namespace {

struct Hermite {
  double y, dy;
};

Hermite hermite(const CurveSample& a, const CurveSample& b, double t) {
  const double h = b.t - a.t;
  const double s = (t - a.t) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double y0 = a.point.imag(), y1 = b.point.imag();
  const double y = (2 * s3 - 3 * s2 + 1) * y0 + (s3 - 2 * s2 + s) * h * a.slope + (-2 * s3 + 3 * s2) * y1 +
                   (s3 - s2) * h * b.slope;
  const double dy = ((6 * s2 - 6 * s) * y0 + (-6 * s2 + 6 * s) * y1) / h + (3 * s2 - 4 * s + 1) * a.slope +
                    (3 * s2 - 2 * s) * b.slope;
  return {y, dy};
}

// Slope of the level set through xi: d/dx Im psi + y' d/dy Im psi = 0.
double level_slope(const LevyModel& m, cplx xi) {
  const cplx d = m.dpsi(xi);
  return -d.imag() / d.real();
}

// Solves Im psi(x + i y) = delta for y near `guess`; nullopt when no root is bracketed nearby.
std::optional<double> correct(const LevyModel& m, double x, double delta, double guess, double width, double tol) {
  auto f = [&](double y) { return m.psi(cplx(x, y)).imag() - delta; };
  double lo = guess - width, hi = guess + width;
  double flo = f(lo), fhi = f(hi);
  for (int k = 0; k < 12 && flo * fhi > 0; ++k) {
    width *= 2;
    lo = guess - width;
    hi = guess + width;
    flo = f(lo);
    fhi = f(hi);
  }
  if (!(flo * fhi <= 0) || !std::isfinite(flo) || !std::isfinite(fhi)) return std::nullopt;
  // Newton with bisection fallback inside the bracket.
  auto fd = [&](double y) {
    const cplx xi(x, y);
    return std::make_pair(m.psi(xi).imag() - delta, m.dpsi(xi).real());
  };
  std::uintmax_t iters = 100;
  double y = boost::math::tools::newton_raphson_iterate(fd, std::clamp(guess, lo, hi), lo, hi, 50, iters);
  if (std::abs(f(y)) > tol) {
    boost::math::tools::eps_tolerance<double> tolf(52);
    iters = 200;
    auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tolf, iters);
    y = 0.5 * (r.first + r.second);
    if (std::abs(f(y)) > tol) return std::nullopt;
  }
  return y;
}

double cap_at(const TraceOptions& opt, double x) { return opt.max_step * std::max(1.0, x / 8.0); }

cplx centre_of(const LevyModel& m, double u) {
  if (auto b = m.symmetrizing_beta()) {
    const double c = -*b;
    if (c > m.strip_minus() && c < m.strip_plus()) return {0.0, c};
  }
  return {0.0, u};
}

// First crossing of Im psi = delta on circles around the centre, preferring the rightmost point.
cplx find_start(const LevyModel& m, double delta, double u) {
  const cplx c = centre_of(m, u);
  const double room = std::min(c.imag() - m.strip_minus(), m.strip_plus() - c.imag());
  const double rmax = std::isfinite(room) ? 0.9 * room : 50.0;
  const int K = 256;
  for (double r = std::min(0.05, 0.25 * rmax); r <= rmax; r *= 1.5) {
    auto f = [&](double th) { return m.psi(c + r * std::polar(1.0, th)).imag() - delta; };
    double best_x = -1, best_lo = 0, best_hi = 0;
    double prev_th = -0.5 * kPi + 1e-6, prev_f = f(prev_th);
    for (int k = 1; k <= K; ++k) {
      const double th = -0.5 * kPi + 1e-6 + (kPi - 2e-6) * k / K;
      const double fv = f(th);
      if (prev_f * fv <= 0 && std::cos(th) > best_x) {
        best_x = std::cos(th);
        best_lo = prev_th;
        best_hi = th;
      }
      prev_th = th;
      prev_f = fv;
    }
    if (best_x > 0) {
      boost::math::tools::eps_tolerance<double> tolf(52);
      std::uintmax_t iters = 200;
      auto rr = boost::math::tools::toms748_solve(f, best_lo, best_hi, tolf, iters);
      cplx s = c + r * std::polar(1.0, 0.5 * (rr.first + rr.second));
      // Polish onto the level set along the vertical so the start passes the trace precondition.
      if (auto y = correct(m, s.real(), delta, s.imag(), 1e-3, 1e-13)) s.imag(*y);
      return s;
    }
  }
  throw TraceError("no point with Im psi = delta found around the centre", c);
}

}  // namespace

std::vector<CurveSample> trace_trajectory(const LevyModel& m, cplx start, double delta, double x_max, double tol,
                                          const TraceOptions& opt) {
  if (!(start.real() > 0)) throw PreconditionError("trace_trajectory: Re start > 0 required");
  const double r0 = m.psi(start).imag() - delta;
  if (!(std::abs(r0) <= tol)) {
    std::ostringstream os;
    os << "trace_trajectory: |Im psi(start) - delta| = " << std::abs(r0) << " exceeds tol " << tol;
    throw PreconditionError(os.str());
  }
  const double ctol = std::min(tol, opt.tol);
  std::vector<CurveSample> out;
  CurveSample cur{start.real(), start, level_slope(m, start)};
  if (!std::isfinite(cur.slope)) throw TraceError("trace_trajectory: level set folds at the start", start);
  out.push_back(cur);
  double h = std::min(cap_at(opt, cur.t), opt.max_step * std::min(1.0, std::abs(m.dpsi(start))));
  int steps = 0;
  while (cur.t < x_max) {
    if (++steps > opt.max_steps) throw TraceError("trace_trajectory: step budget exhausted", cur.point);
    h = std::min({h, cap_at(opt, cur.t), x_max - cur.t});
    if (h < 1e-12 * std::max(1.0, cur.t)) throw TraceError("trace_trajectory: step size underflow", cur.point);
    const double x1 = cur.t + h;
    const double guess = cur.point.imag() + h * cur.slope;
    const double width = std::max(1e-8, 0.5 * h * std::abs(cur.slope) + 1e-3 * h);
    auto y1 = correct(m, x1, delta, guess, width, ctol);
    if (!y1) {
      h *= 0.5;
      continue;
    }
    CurveSample nxt{x1, cplx(x1, *y1), level_slope(m, cplx(x1, *y1))};
    if (!std::isfinite(nxt.slope)) {
      h *= 0.5;
      continue;
    }
    // Accept only if the cubic through both samples reproduces the level set at the midpoint.
    const double xm = cur.t + 0.5 * h;
    const Hermite hm = hermite(cur, nxt, xm);
    auto ym = correct(m, xm, delta, hm.y, std::max(1e-8, std::abs(*y1 - cur.point.imag())), ctol);
    const double scale = std::max(1.0, std::abs(hm.y));
    if (!ym || std::abs(*ym - hm.y) > opt.interp_tol * scale) {
      h *= 0.5;
      continue;
    }
    out.push_back(nxt);
    cur = nxt;
    if (std::abs(*ym - hm.y) < 0.05 * opt.interp_tol * scale) h *= 1.5;
  }
  return out;
}

cplx ExtendedCurve::point(double t) const {
  double tt = t;
  if (flatten_at_ && std::abs(t) > *flatten_at_) tt = std::copysign(*flatten_at_, t);
  if (std::abs(tt) > samples_.back().t * (1 + 1e-14)) throw DomainError("ExtendedCurve: t beyond traced range");
  auto it = std::lower_bound(samples_.begin(), samples_.end(), tt,
                             [](const CurveSample& s, double v) { return s.t < v; });
  if (it == samples_.begin()) ++it;
  if (it == samples_.end()) --it;
  return {t, hermite(*(it - 1), *it, tt).y};
}

cplx ExtendedCurve::deriv(double t) const {
  if (flatten_at_ && std::abs(t) > *flatten_at_) return {1.0, 0.0};
  if (std::abs(t) > samples_.back().t * (1 + 1e-14)) throw DomainError("ExtendedCurve: t beyond traced range");
  auto it = std::lower_bound(samples_.begin(), samples_.end(), t,
                             [](const CurveSample& s, double v) { return s.t < v; });
  if (it == samples_.begin()) ++it;
  if (it == samples_.end()) --it;
  return {1.0, hermite(*(it - 1), *it, t).dy};
}

CurveSegment ExtendedCurve::segment(double t) const {
  if (flatten_at_ && std::abs(t) > *flatten_at_) return CurveSegment::flat;
  if (std::abs(t) < x_connect_) return CurveSegment::connector;
  return t > 0 ? CurveSegment::right_wing : CurveSegment::left_wing;
}

double ExtendedCurve::level_residual(const LevyModel& m, const CurveSample& s) const {
  const double target = s.t > 0 ? delta_ : -delta_;
  return m.psi(s.point).imag() - target;
}

ExtendedCurve build_extended_curve(const LevyModel& m, double delta, double u, double x_max,
                                   const TraceOptions& opt) {
  if (delta == 0.0) throw PreconditionError("build_extended_curve: delta must be nonzero");
  if (!(u > m.strip_minus() && u < m.strip_plus())) {
    std::ostringstream os;
    os << "build_extended_curve: iu = " << u << "i is not inside the strip (" << m.strip_minus() << ", "
       << m.strip_plus() << "); the connector would cross a cut";
    throw PreconditionError(os.str());
  }
  const cplx start = find_start(m, delta, u);
  std::vector<CurveSample> wing = trace_trajectory(m, start, delta, std::max(x_max, start.real() + 1.0), 1e-10, opt);
  // Join where the wing has become a gentle graph; the connector then stays well conditioned.
  size_t j = 0;
  while (j + 1 < wing.size() && (std::abs(wing[j].slope) > 1.0 || wing[j].t < 0.25)) ++j;
  if (j + 1 >= wing.size()) throw TraceError("build_extended_curve: wing never flattens to slope <= 1", wing.back().point);
  const CurveSample& jc = wing[j];
  const double xc = jc.t, dy = jc.point.imag() - u, s = jc.slope;
  // y(x) = u + a x^2 + b x^3 with y(xc), y'(xc) matching the wing.
  const double a = (3 * dy - s * xc) / (xc * xc);
  const double b = (s * xc - 2 * dy) / (xc * xc * xc);
  std::vector<CurveSample> right;
  const int nc = 16;
  for (int k = 0; k < nc; ++k) {
    const double x = xc * k / nc;
    right.push_back({x, cplx(x, u + a * x * x + b * x * x * x), 2 * a * x + 3 * b * x * x});
  }
  right.insert(right.end(), wing.begin() + static_cast<long>(j), wing.end());

  ExtendedCurve c;
  c.delta_ = delta;
  c.u_ = u;
  c.x_connect_ = xc;
  c.samples_.reserve(2 * right.size());
  for (auto it = right.rbegin(); it != right.rend() - 1; ++it)
    c.samples_.push_back({-it->t, cplx(-it->t, it->point.imag()), -it->slope});
  c.samples_.insert(c.samples_.end(), right.begin(), right.end());
  c.d_curve_ = strip_width_estimate(m, c);
  return c;
}

ExtendedCurve flatten_curve(const LevyModel& m, const ExtendedCurve& c, double x_star, double delta_star) {
  if (!(x_star > 0)) throw PreconditionError("flatten_curve: x* > 0 required");
  const Asymptotics& as = m.asymptotics();
  bool ok = as.nu0 > 0 && as.nu0 < 1;
  for (const auto& t : as.terms) {
    if (t.nu > 0 && !(t.d.imag() == 0.0 && t.d.real() > 0)) ok = false;
    if (t.nu == 0 && t.d.imag() != 0.0) ok = false;
  }
  if (!ok) throw PreconditionError("flatten_curve: requires nu0 in (0,1) and positive real coefficients for nu_j > 0");
  if (x_star >= c.x_max()) return c;
  if (x_star < c.x_connect()) throw PreconditionError("flatten_curve: x* lies inside the connector");
  ExtendedCurve f = c;
  const double ys = c.point(x_star).imag();
  // Flat wings: sample geometrically far beyond the traced range.
  const double x_end = std::max(1e3 * x_star, 10.0 * c.x_max());
  double worst = 0.0;
  const int K = 4000;
  for (int k = 0; k <= K; ++k) {
    const double x = x_star * std::pow(x_end / x_star, double(k) / K);
    worst = std::max(worst, std::abs(m.psi(cplx(x, ys)).imag()));
  }
  if (!(worst < delta_star)) {
    std::ostringstream os;
    os << "flatten_curve: x* = " << x_star << " too small, max |Im psi| on the flat wing = " << worst
       << " >= delta* = " << delta_star;
    throw PreconditionError(os.str());
  }
  std::vector<CurveSample> kept;
  for (const auto& s : c.samples()) {
    if (std::abs(s.t) < x_star) kept.push_back(s);
  }
  const double sl = c.deriv(x_star).imag();
  kept.insert(kept.begin(), {-x_star, cplx(-x_star, ys), -sl});
  kept.push_back({x_star, cplx(x_star, ys), sl});
  f.samples_ = std::move(kept);
  f.flatten_at_ = x_star;
  f.d_curve_ = std::min(c.d_curve(), strip_width_estimate(m, f));
  return f;
}

double strip_width_estimate(const LevyModel& m, const ExtendedCurve& c) {
  const double lo = m.strip_minus(), hi = m.strip_plus();
  auto cut_distance = [&](cplx p) {
    const double x = std::abs(p.real()), y = p.imag();
    double d = std::numeric_limits<double>::infinity();
    if (std::isfinite(hi)) d = std::min(d, y >= hi ? x : std::hypot(x, hi - y));
    if (std::isfinite(lo)) d = std::min(d, y <= lo ? x : std::hypot(x, y - lo));
    return d;
  };
  // Critical point of psi on iR: the minimum of psi(iy), located by golden-section search.
  double crit = std::numeric_limits<double>::quiet_NaN();
  {
    const double a0 = std::isfinite(lo) ? lo + 1e-6 : -50.0, b0 = std::isfinite(hi) ? hi - 1e-6 : 50.0;
    auto g = [&](double y) { return m.psi(cplx(0.0, y)).real(); };
    auto r = boost::math::tools::brent_find_minima(g, a0, b0, 40);
    if (std::abs(m.dpsi(cplx(0.0, r.first))) < 1e-6) crit = r.first;
  }
  double d = std::numeric_limits<double>::infinity();
  const auto& S = c.samples();
  for (size_t k = 0; k < S.size(); ++k) {
    const CurveSample& s = S[k];
    d = std::min(d, cut_distance(s.point));
    const CurveSegment seg = c.segment(s.t);
    if (seg == CurveSegment::left_wing || seg == CurveSegment::right_wing) {
      if (std::isfinite(crit)) d = std::min(d, std::abs(s.point - cplx(0.0, crit)));
      // Fold: Re psi' vanishes where the level set turns vertical; first-order distance to it.
      const cplx d1 = m.dpsi(s.point);
      const double hstep = 1e-4 * std::max(1.0, std::abs(s.point));
      const cplx d2 = (m.dpsi(s.point + hstep) - m.dpsi(s.point - hstep)) / (2 * hstep);
      if (std::abs(d2) > 0) d = std::min(d, std::abs(d1.real()) / std::abs(d2));
    }
  }
  return 0.8 * d;
}

CurvePair make_curve_pair(const LevyModel& m, double delta_lo, double u_lo, double delta_hi, double u_hi,
                          double x_max, const TraceOptions& opt) {
  auto fl = std::async(std::launch::async, [&] { return build_extended_curve(m, delta_lo, u_lo, x_max, opt); });
  ExtendedCurve up = build_extended_curve(m, delta_hi, u_hi, x_max, opt);
  CurvePair p{fl.get(), std::move(up)};
  const double X = std::min(p.lower.x_max(), p.upper.x_max());
  const int K = 2001;
  for (int k = 0; k < K; ++k) {
    const double t = -X + 2 * X * k / (K - 1);
    if (!(p.upper.point(t).imag() > p.lower.point(t).imag())) {
      std::ostringstream os;
      os << "make_curve_pair: curves intersect near t = " << t;
      throw PreconditionError(os.str());
    }
  }
  return p;
}

void write_curve_csv(std::ostream& os, const LevyModel& m, const ExtendedCurve& c) {
  os.precision(17);
  os << "t,re,im,segment,im_psi_residual\n";
  const char* names[] = {"left_wing", "connector", "right_wing", "flat"};
  for (const auto& s : c.samples()) {
    const CurveSegment seg = c.segment(s.t);
    os << s.t << ',' << s.point.real() << ',' << s.point.imag() << ',' << names[static_cast<int>(seg)] << ',';
    const bool on_level = (seg == CurveSegment::left_wing || seg == CurveSegment::right_wing);
    if (on_level) os << c.level_residual(m, s);
    os << '\n';
  }
}

}  // namespace sinhz
