#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include "sinhz/levy.hpp"

namespace sinhz {

// One point of a curve parametrized as a graph over the real axis: point = t + i y(t), slope = y'(t).
struct CurveSample {
  double t = 0.0;
  cplx point{};
  double slope = 0.0;
};

enum class CurveSegment { left_wing, connector, right_wing, flat };

struct TraceOptions {
  double tol = 1e-11;        // residual |Im psi - delta| accepted by the corrector
  double interp_tol = 1e-10; // Hermite midpoint deviation allowed between samples (relative to max(1,|y|))
  double max_step = 0.25;    // step cap near the origin; grows linearly with x beyond x = 8
  int max_steps = 200000;
};

// Level set Im psi = delta traced rightwards from `start` up to Re = x_max. Samples carry exact slopes.
std::vector<CurveSample> trace_trajectory(const LevyModel& m, cplx start, double delta, double x_max,
                                          double tol = 1e-10, const TraceOptions& opt = {});

// Curve symmetric under (x, y) -> (-x, y): wings on Im psi = +-delta, cubic connector through iu with y'(0) = 0.
// Parametrized by t = Re point on the whole curve; samples are ordered by t.
class ExtendedCurve {
 public:
  double delta() const { return delta_; }
  double u() const { return u_; }
  const std::vector<CurveSample>& samples() const { return samples_; }
  std::optional<double> flatten_at() const { return flatten_at_; }
  double d_curve() const { return d_curve_; }
  double x_max() const { return samples_.back().t; }
  // Abscissa where the traced wing starts; inside it the curve is the connector cubic.
  double x_connect() const { return x_connect_; }

  // Position and derivative of the parametrization; flattened curves extend to any t.
  cplx point(double t) const;
  cplx deriv(double t) const;
  CurveSegment segment(double t) const;
  // Im psi(point) minus the wing level; zero up to the trace tolerance on unflattened wings.
  double level_residual(const LevyModel& m, const CurveSample& s) const;

 private:
  friend ExtendedCurve build_extended_curve(const LevyModel&, double, double, double, const TraceOptions&);
  friend ExtendedCurve flatten_curve(const LevyModel&, const ExtendedCurve&, double, double);
  double delta_ = 0.0, u_ = 0.0, x_connect_ = 0.0, d_curve_ = 0.0;
  std::optional<double> flatten_at_;
  std::vector<CurveSample> samples_;  // t ascending, mirror-symmetric
};

ExtendedCurve build_extended_curve(const LevyModel& m, double delta, double u, double x_max,
                                   const TraceOptions& opt = {});

// Holds Im point constant beyond +-x_star; fails when |Im psi| reaches delta_star on the flat wings.
ExtendedCurve flatten_curve(const LevyModel& m, const ExtendedCurve& c, double x_star, double delta_star = 0.1);

// 0.8 x min(distance to cuts, distance of wings to critical points of psi, fold distance).
double strip_width_estimate(const LevyModel& m, const ExtendedCurve& c);

struct CurvePair {
  ExtendedCurve lower;
  ExtendedCurve upper;
};

// Traces both curves concurrently; throws PreconditionError when they intersect on the sampled range.
CurvePair make_curve_pair(const LevyModel& m, double delta_lo, double u_lo, double delta_hi, double u_hi,
                          double x_max, const TraceOptions& opt = {});

// CSV columns: t,re,im,segment,im_psi_residual (residual left blank off the level set).
void write_curve_csv(std::ostream& os, const LevyModel& m, const ExtendedCurve& c);

}  // namespace sinhz
