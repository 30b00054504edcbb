#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "sinhz/contours.hpp"
#include "sinhz/errors.hpp"
#include "sinhz/numeric.hpp"

namespace sinhz {

// Growth model of |V~| used only to size the contour truncation.
//   generic:     |V~(q)| <= C_V (1 + |q|)^{a_V}
//   pole_at_one: |V~(q)| <= C_V |1 - q|^{-1} (q normalized by `radius`)
//   entire:      coefficients of an entire function; the engine normalizes by the saddle radius n
enum class BoundKind { generic, pole_at_one, entire };

// Metadata of a transform; radius R normalizes q = R q~ so the nearest singularity sits on |q~| = 1.
struct TransformInfo {
  double a_V = 0.0;
  double C_V = 1.0;
  double gamma = 0.0;
  BoundKind bound_kind = BoundKind::pole_at_one;
  double radius = 1.0;
  bool real_coefficients = true;
  // Known singular points of V~ (unnormalized q). When present, contour admissibility is the exact
  // separation test instead of the sector test, and the growth bound uses the nearest pole.
  std::vector<cplx> poles;
  // Optional log|V~(q)| upper bound; overrides the bound implied by bound_kind.
  std::function<double(cplx)> log_bound;
};

template <class C>
struct BasicTransform : TransformInfo {
  std::function<C(const C&)> eval;
  std::function<C(const C&)> log_eval;  // optional: log V~, for values outside the floating range
};
using TransformEvaluator = BasicTransform<cplx>;

// value = mantissa * exp(log_scale) * radius^{-radius_power}; lets 2^-1000 and 1/3780! survive double
// precision. The radius power is kept apart so that huge n ln R terms never round the log scale.
template <class C>
struct ScaledValue {
  C mantissa{};
  double log_scale = 0.0;
  double radius = 1.0;
  int radius_power = 0;
  long double log_factor() const {
    return static_cast<long double>(log_scale) -
           static_cast<long double>(radius_power) * std::log(static_cast<long double>(radius));
  }
  C value() const {
    using std::exp;
    using R = decltype(std::abs(mantissa));
    return mantissa * static_cast<R>(exp(static_cast<R>(static_cast<double>(log_factor()))));
  }
  long double log_abs() const {
    using std::abs;
    return std::log(static_cast<long double>(static_cast<double>(abs(mantissa)))) + log_factor();
  }
};

struct TrapPlan {
  double r = 0.0;
  double rho = 1.0;
  double M = 0.0;
  double M1 = 0.0;
  int N = 0;
  double N_exact = 0.0;   // node count from the exact bound, before rounding
  double N_approx = 0.0;  // (n/M)(E + 2M)
};

enum class SinhFamily {
  auto_select,    // cheapest admissible of the three below
  right_opening,  // omega + d <= 0: |q| grows monotonically along every strip line
  sector_a,       // omega = gamma/4 + pi/8, d = k_d (pi/8 - gamma/4)
  sector_b        // omega = gamma/2 - pi/8, d = k_d (3 pi/8 - gamma/2)
};

struct SinhPlan {
  SinhZContour contour;
  SinhFamily family = SinhFamily::right_opening;
  double hardy_log = 0.0;          // ln of the sampled Hardy norm relative to the target scale
  double hardy_log_formula = 0.0;  // 2M + ln n
  double Lambda_formula = 0.0;
  double log_scale = 0.0;          // ln of the assumed |R^n V_n| scale the tolerance is relative to
  int predicted_terms = 0;  // N_l from the closed-form complexity estimate
  double E = 0.0;
  double M = 0.0;
  double M1 = 0.0;
  double Lambda0 = 0.0;
  double radius = 1.0;
  int n = 0;
  int adjustments = 0;
  bool half_sum = true;
};

struct SinhOptions {
  double k_d = 0.85;
  SinhFamily family = SinhFamily::auto_select;
  int max_adjust = 8;
  int n_min = 8;
};

// Effective normalization radius for a transform at coefficient index n.
double effective_radius(const TransformInfo& info, int n);

// M for which roundoff of e^M-sized terms stays below eps (clamped to [1, 23]).
double auto_M(double eps, double unit_roundoff = 2.220446049250313e-16, double safety = 32.0);

TrapPlan choose_trap_params(double eps, int n, double M);
double trapezoid_error_bound(const TransformEvaluator& V, int n, const TrapPlan& plan);

SinhPlan choose_sinh_params(const TransformInfo& V, double eps, int n, double M,
                            const SinhOptions& opt = {});

// Length of the y-interval where |chi(y)| < 1.
double inner_disc_length(const SinhZContour& c);

double gain_factor(double eps, int n, double M);

// log|V~(q)| upper bound implied by the metadata.
double log_growth_bound(const TransformInfo& V, cplx q);
// True when every pole (normalized coordinates) lies strictly right of the strip image.
bool separates_poles(const SinhZContour& c, const std::vector<cplx>& normalized_poles);

enum class ResolventKind { self_adjoint, normal_sector };
// Upper bound of |(1 - q P)^{-1}| for a scalar/normal P with ||P|| <= norm_P (sector half-angle gamma).
// For the sector kind gamma_prime defaults to the largest admissible value min(pi/2, pi - |arg(-q)|).
double resolvent_bound(cplx q, double norm_P, double gamma, ResolventKind kind,
                       std::optional<double> gamma_prime = std::nullopt);

// Quadrature nodes for V_n ~ sum_j exp(log_weight_j) * V~(q_j) (real part for half sums).
template <class C>
struct ZNode {
  C q;
  C log_weight;
};

template <class C>
std::vector<ZNode<C>> trapezoid_nodes(const TransformInfo& V, int n, const TrapPlan& plan);
template <class C>
std::vector<ZNode<C>> sinh_nodes(const SinhPlan& plan, int n);

template <class C>
ScaledValue<C> combine_nodes(const std::vector<ZNode<C>>& nodes, const std::vector<C>& values,
                             bool real_part, const std::vector<C>* log_values = nullptr);

template <class C>
ScaledValue<C> invert_trapezoid(const BasicTransform<C>& V, int n, const TrapPlan& plan);
template <class C>
ScaledValue<C> invert_sinh(const BasicTransform<C>& V, int n, const SinhPlan& plan);

// Auto path: sinh for n >= n_min, trapezoid below; M from auto_M unless given.
template <class C>
ScaledValue<C> invert(const BasicTransform<C>& V, int n, double eps,
                      std::optional<double> M = std::nullopt, const SinhOptions& opt = {});

}  // namespace sinhz

#include "sinhz/detail/zinv_impl.hpp"
