#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sinhz/levelcurves.hpp"
#include "sinhz/levy.hpp"
#include "sinhz/payoffs.hpp"
#include "sinhz/wh.hpp"
#include "sinhz/zinv.hpp"

namespace sinhz {

enum class PricingMode { symmetric, nonsymmetric, auto_select };

struct PricingRequest {
  PricingRequest(LevyModel m, PayoffTransform p) : model(std::move(m)), payoff(std::move(p)) {}
  LevyModel model;
  PayoffTransform payoff;
  int n = 1;                       // monitoring dates
  double q0 = 1.0;                 // per-period discount factor
  double x = 0.0;                  // log-spot
  std::optional<double> barrier;   // up-and-out level h
  double eps = 1e-10;
  PricingMode mode = PricingMode::auto_select;
  int threads = 1;
};

struct PricingResult {
  double price = 0.0;
  double error_estimate = 0.0;  // change over the last contour refinement
  std::string method;
  int z_nodes = 0;              // outer q-nodes of the final pass
  int xi_nodes = 0;             // inner nodes of the final pass
  int refinements = 0;
  std::optional<SinhPlan> z_plan;
};

// Vertex on iR, wing angle and strip half-width of a European sinh contour.
SinhXiContour european_contour(const LevyModel& m, const PayoffTransform& p, double x);

PricingResult price_european_symmetric(const PricingRequest& req);
PricingResult price_european_nonsymmetric(const PricingRequest& req);
PricingResult price_barrier(const PricingRequest& req);
// Dispatch on barrier presence and mode (auto: symmetric when an Esscher shift symmetrizes the model).
PricingResult price(const PricingRequest& req);

// Which pricer paths accept this model/payoff; the reason names the failed hypothesis.
struct Capability {
  bool european_symmetric = false;
  bool european_nonsymmetric = false;
  bool barrier = false;
  std::string reason;
};
Capability capability(const LevyModel& m, const PayoffTransform& p);

// Single inner integral along one contour, refined by node doubling.
using XiContour = std::variant<FlatLine, SinhXiContour, std::shared_ptr<const ExtendedCurve>>;

struct InnerIntegralPlan {
  InnerIntegralPlan(LevyModel m, PayoffTransform p) : model(std::move(m)), payoff(std::move(p)) {}
  LevyModel model;
  PayoffTransform payoff;
  double x = 0.0;
  std::optional<double> barrier;
  XiContour xi_contour = FlatLine{1.0};
  XiContour eta_contour = FlatLine{-1.0};  // barrier payloads only
  double eps = 1e-12;
  int max_doublings = 6;
};

enum class InnerPayload { european, barrier_eta, barrier_xi };

struct InnerValue {
  cplx value{};
  double error = 0.0;
  int nodes = 0;
};

// european:    I(q) = (1/2 pi) int e^{i(x-a) xi} Phi G0 / (1 - q Phi) d xi over xi_contour
// barrier_eta: J(q), the knock-out correction (xi over xi_contour, eta over eta_contour)
// barrier_xi:  the inner xi-integral of J at the given eta
InnerValue inner_integral(const InnerIntegralPlan& plan, cplx q, InnerPayload payload, cplx eta = 0.0);

}  // namespace sinhz
