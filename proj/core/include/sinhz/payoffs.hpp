#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "sinhz/numeric.hpp"

namespace sinhz {

enum class PayoffKind { put, call, digital_up, digital_down, custom };

// One term e^{-i a xi} G0(xi) of the payoff transform.
struct PayoffTerm {
  double a = 0.0;
  std::function<cplx(cplx)> g0;
};

// G^(xi) = sum_k e^{-i a_k xi} G0_k(xi), analytic for Im xi in (strip_lo, strip_hi).
// Convention: G^(xi) = int e^{-i x xi} G(x) dx.
struct PayoffTransform {
  PayoffKind kind = PayoffKind::custom;
  double strike = 1.0;
  double amplitude = 1.0;
  double beta = 0.0;  // damping: G(x) = e^{beta x} G_beta(x), -beta inside the strip
  double strip_lo = -INFINITY;
  double strip_hi = INFINITY;
  double decay_C = 1.0;  // |G0(xi)| <= decay_C / |xi| away from the poles
  std::vector<PayoffTerm> terms;
  std::vector<cplx> poles;              // finite poles of G0 (all on iR for built-in kinds)
  std::function<double(double)> value;  // G(x), pointwise
  std::string label;

  double level() const { return terms.empty() ? 0.0 : terms.front().a; }
};

PayoffTransform make_put(double strike);
PayoffTransform make_call(double strike);
// amplitude * 1_[a, inf) and amplitude * 1_(-inf, a).
PayoffTransform make_digital_up(double a, double amplitude = 1.0);
PayoffTransform make_digital_down(double a, double amplitude = 1.0);
// User-declared terms and strip; the strip is verified by sampling for poles.
PayoffTransform make_custom(std::vector<PayoffTerm> terms, double strip_lo, double strip_hi,
                            std::function<double(double)> value, std::vector<cplx> poles = {});

// Transform of e^{-beta x} G(x): G^(xi - i beta), strip shifted by +beta.
PayoffTransform esscher_payoff(const PayoffTransform& p, double beta);

cplx ghat_eval(const PayoffTransform& p, cplx xi);
std::pair<double, double> regularity_strip(const PayoffTransform& p);
// Throws PreconditionError (with the admissible beta range) unless -beta is strictly inside the strip.
void check_damping(const PayoffTransform& p, double beta);

}  // namespace sinhz
