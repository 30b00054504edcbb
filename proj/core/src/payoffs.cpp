#include "sinhz/payoffs.hpp"

#include <cmath>
#include <sstream>

#include "sinhz/errors.hpp"

namespace sinhz {

namespace {

constexpr double kPoleTol = 1e-13;

PayoffTransform vanilla(PayoffKind kind, double strike) {
  if (!(strike > 0)) throw PreconditionError("strike must be positive");
  PayoffTransform p;
  p.kind = kind;
  p.strike = strike;
  p.decay_C = strike;
  const double K = strike;
  p.terms.push_back({std::log(K), [K](cplx xi) { return -K / (xi * (xi + kI)); }});
  p.poles = {cplx(0.0), cplx(0.0, -1.0)};
  if (kind == PayoffKind::put) {
    p.strip_lo = 0.0;
    p.label = "put";
    p.value = [K](double x) { return std::max(K - std::exp(x), 0.0); };
  } else {
    p.strip_hi = -1.0;
    p.label = "call";
    p.value = [K](double x) { return std::max(std::exp(x) - K, 0.0); };
  }
  return p;
}

PayoffTransform digital(PayoffKind kind, double a, double amp) {
  PayoffTransform p;
  p.kind = kind;
  p.amplitude = amp;
  p.decay_C = std::abs(amp);
  p.poles = {cplx(0.0)};
  if (kind == PayoffKind::digital_up) {
    p.terms.push_back({a, [amp](cplx xi) { return amp / (kI * xi); }});
    p.strip_hi = 0.0;
    p.label = "digital_up";
    p.value = [a, amp](double x) { return x >= a ? amp : 0.0; };
  } else {
    p.terms.push_back({a, [amp](cplx xi) { return -amp / (kI * xi); }});
    p.strip_lo = 0.0;
    p.label = "digital_down";
    p.value = [a, amp](double x) { return x < a ? amp : 0.0; };
  }
  return p;
}

}  // namespace

PayoffTransform make_put(double strike) { return vanilla(PayoffKind::put, strike); }
PayoffTransform make_call(double strike) { return vanilla(PayoffKind::call, strike); }
PayoffTransform make_digital_up(double a, double amplitude) {
  return digital(PayoffKind::digital_up, a, amplitude);
}
PayoffTransform make_digital_down(double a, double amplitude) {
  return digital(PayoffKind::digital_down, a, amplitude);
}

PayoffTransform make_custom(std::vector<PayoffTerm> terms, double strip_lo, double strip_hi,
                            std::function<double(double)> value, std::vector<cplx> poles) {
  if (!(strip_lo < strip_hi)) throw PreconditionError("custom payoff: empty strip");
  PayoffTransform p;
  p.kind = PayoffKind::custom;
  p.terms = std::move(terms);
  p.strip_lo = strip_lo;
  p.strip_hi = strip_hi;
  p.poles = std::move(poles);
  p.value = std::move(value);
  p.label = "custom";
  // Pole-absence check on a grid of the open strip; a pole shows up as a spike in |G0|.
  const double lo = std::isfinite(strip_lo) ? strip_lo : strip_hi - 4.0;
  const double hi = std::isfinite(strip_hi) ? strip_hi : lo + 4.0;
  for (int i = 1; i < 8; ++i) {
    const double y = lo + (hi - lo) * i / 8.0;
    for (int k = -40; k <= 40; ++k) {
      const cplx xi(0.25 * k, y);
      for (const auto& t : p.terms) {
        const cplx v = t.g0(xi);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()) || std::abs(v) > 1e12) {
          throw PreconditionError("custom payoff: G0 is singular inside the declared strip");
        }
      }
    }
  }
  return p;
}

PayoffTransform esscher_payoff(const PayoffTransform& p, double beta) {
  PayoffTransform q = p;
  q.kind = PayoffKind::custom;
  q.label = p.label + "_esscher";
  q.strip_lo = p.strip_lo + beta;
  q.strip_hi = p.strip_hi + beta;
  q.beta = p.beta - beta;
  const cplx shift(0.0, -beta);
  for (auto& t : q.terms) {
    const double scale = std::exp(-t.a * beta);
    auto g = t.g0;
    t.g0 = [g, scale, shift](cplx xi) { return scale * g(xi + shift); };
  }
  for (auto& z : q.poles) z -= shift;
  auto v = p.value;
  q.value = [v, beta](double x) { return std::exp(-beta * x) * v(x); };
  return q;
}

cplx ghat_eval(const PayoffTransform& p, cplx xi) {
  for (const cplx& z : p.poles) {
    if (std::abs(xi - z) < kPoleTol) {
      std::ostringstream os;
      os << "ghat_eval: xi = " << xi << " is a pole";
      throw PoleError(os.str());
    }
  }
  cplx s = 0.0;
  for (const auto& t : p.terms) s += std::exp(-kI * t.a * xi) * t.g0(xi);
  return s;
}

std::pair<double, double> regularity_strip(const PayoffTransform& p) { return {p.strip_lo, p.strip_hi}; }

void check_damping(const PayoffTransform& p, double beta) {
  if (!(-beta > p.strip_lo && -beta < p.strip_hi)) {
    std::ostringstream os;
    os << p.label << ": -beta = " << -beta << " outside the regularity strip (" << p.strip_lo << ", "
       << p.strip_hi << "); admissible beta in (" << -p.strip_hi << ", " << -p.strip_lo << ")";
    throw PreconditionError(os.str());
  }
}

}  // namespace sinhz
