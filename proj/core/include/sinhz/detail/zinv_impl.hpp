#pragma once

// Template bodies for zinv.hpp; instantiated for std::complex<double> and Boost complex128.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sinhz {

namespace detail {

template <class C>
auto abs_adl(const C& c) {
  using std::abs;
  return abs(c);
}

template <class C>
using real_of = std::decay_t<decltype(abs_adl(std::declval<C>()))>;

template <class C>
C make_c(double re, double im) {
  using R = real_of<C>;
  return C(R(re), R(im));
}

template <class C>
real_of<C> pi_of() {
  using R = real_of<C>;
  // atan(1) evaluated in R keeps full precision for extended types.
  using std::atan;
  return R(4) * atan(R(1));
}

}  // namespace detail

template <class C>
std::vector<ZNode<C>> trapezoid_nodes(const TransformInfo& V, int n, const TrapPlan& plan) {
  using R = detail::real_of<C>;
  using std::cos;
  using std::log;
  using std::sin;
  if (plan.N <= 0 || !(plan.r > 0 && plan.r < 1)) throw PreconditionError("trapezoid plan is empty");
  const double radius = effective_radius(V, n);
  const R rr = R(radius) * R(plan.r);
  const R pi = detail::pi_of<C>();
  std::vector<ZNode<C>> nodes(plan.N);
  const R log_r = log(R(plan.r));
  const R logN = log(R(plan.N));
  for (int k = 0; k < plan.N; ++k) {
    const R theta = R(2) * pi * R(k) / R(plan.N);
    nodes[k].q = C(rr * cos(theta), rr * sin(theta));
    nodes[k].log_weight = C(-logN - R(n) * log_r, -R(n) * theta);  // radius^{-n} kept apart
  }
  return nodes;
}

template <class C>
std::vector<ZNode<C>> sinh_nodes(const SinhPlan& plan, int n) {
  using R = detail::real_of<C>;
  using std::cosh;
  using std::log;
  using std::sinh;
  const SinhZContour& c = plan.contour;
  const R pi = detail::pi_of<C>();
  const R zeta = R(c.zeta);
  const C iomega = C(R(0), R(c.omega));
  const C ib = C(R(0), R(c.b));
  const int jlo = plan.half_sum ? 0 : -c.N;
  std::vector<ZNode<C>> nodes;
  nodes.reserve(c.N - jlo + 1);
  for (int j = jlo; j <= c.N; ++j) {
    const C y = C(R(j) * zeta, R(0));
    const C qt = C(R(c.sigma), R(0)) + ib * sinh(iomega + y);
    const C dq = C(R(c.b), R(0)) * cosh(iomega + y);
    R lw0 = log(zeta / (R(2) * pi));  // radius^{-n} kept apart
    if (plan.half_sum && j > 0) lw0 += log(R(2));
    ZNode<C> node;
    node.q = qt * R(plan.radius);
    node.log_weight = C(lw0, R(0)) + log(dq) - R(n + 1) * log(qt);
    nodes.push_back(node);
  }
  return nodes;
}

template <class C>
ScaledValue<C> combine_nodes(const std::vector<ZNode<C>>& nodes, const std::vector<C>& values,
                             bool real_part, const std::vector<C>* log_values) {
  using R = detail::real_of<C>;
  using std::abs;
  using std::exp;
  using std::log;
  using std::real;
  const size_t m = nodes.size();
  std::vector<C> logs(m);
  double top = -std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < m; ++j) {
    if (log_values) {
      logs[j] = nodes[j].log_weight + (*log_values)[j];
    } else {
      if (abs(values[j]) == R(0)) {
        logs[j] = C(R(-std::numeric_limits<double>::infinity()), R(0));
        continue;
      }
      logs[j] = nodes[j].log_weight + C(log(abs(values[j])), R(0));
    }
    top = std::max(top, static_cast<double>(real(logs[j])));
  }
  ScaledValue<C> out;
  if (!std::isfinite(top)) return out;
  out.log_scale = top;
  C acc = detail::make_c<C>(0, 0);
  for (size_t j = 0; j < m; ++j) {
    if (log_values) {
      acc += exp(logs[j] - R(top));
    } else if (abs(values[j]) != R(0)) {
      acc += exp(nodes[j].log_weight - R(top)) * values[j];
    }
  }
  out.mantissa = real_part ? C(real(acc), R(0)) : acc;
  return out;
}

namespace detail {

template <class C>
ScaledValue<C> run_nodes(const BasicTransform<C>& V, const std::vector<ZNode<C>>& nodes, bool real_part,
                         double radius, int n) {
  std::vector<C> vals(nodes.size());
  ScaledValue<C> out;
  if (V.log_eval) {
    for (size_t j = 0; j < nodes.size(); ++j) vals[j] = V.log_eval(nodes[j].q);
    out = combine_nodes(nodes, vals, real_part, &vals);
  } else {
    for (size_t j = 0; j < nodes.size(); ++j) vals[j] = V.eval(nodes[j].q);
    out = combine_nodes(nodes, vals, real_part);
  }
  out.radius = radius;
  out.radius_power = n;
  return out;
}

}  // namespace detail

template <class C>
ScaledValue<C> invert_trapezoid(const BasicTransform<C>& V, int n, const TrapPlan& plan) {
  if (n < 0) throw PreconditionError("invert_trapezoid: n must be non-negative");
  using R = detail::real_of<C>;
  // r^{-n} = e^M must be representable when terms are formed without log scaling.
  if (plan.M > std::log(static_cast<double>(std::numeric_limits<R>::max()))) {
    throw PreconditionError("invert_trapezoid: r^{-n} overflows the floating range");
  }
  return detail::run_nodes(V, trapezoid_nodes<C>(V, n, plan), V.real_coefficients, effective_radius(V, n), n);
}

template <class C>
ScaledValue<C> invert_sinh(const BasicTransform<C>& V, int n, const SinhPlan& plan) {
  if (!(n > V.a_V)) {
    std::ostringstream os;
    os << "invert_sinh: need n > a_V (n=" << n << ", a_V=" << V.a_V << ")";
    throw PreconditionError(os.str());
  }
  SinhPlan p = plan;
  p.half_sum = plan.half_sum && V.real_coefficients;
  return detail::run_nodes(V, sinh_nodes<C>(p, n), p.half_sum, p.radius, n);
}

template <class C>
ScaledValue<C> invert(const BasicTransform<C>& V, int n, double eps, std::optional<double> M,
                      const SinhOptions& opt) {
  const double MM = M.value_or(auto_M(eps));
  if (n < opt.n_min) {
    if (n == 0) {
      ScaledValue<C> out;
      out.mantissa = V.eval(detail::make_c<C>(0, 0));
      return out;
    }
    return invert_trapezoid(V, n, choose_trap_params(eps, n, MM));
  }
  return invert_sinh(V, n, choose_sinh_params(V, eps, n, MM, opt));
}

}  // namespace sinhz
