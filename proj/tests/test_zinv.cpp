#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sinhz/errors.hpp"
#include "sinhz/oracles.hpp"
#include "sinhz/zinv.hpp"

namespace {

using sinhz::cplx;
using sinhz::TransformEvaluator;

TransformEvaluator geometric(double rho) {
  TransformEvaluator V;
  V.eval = [rho](const cplx& q) { return 1.0 / (1.0 - rho * q); };
  V.log_eval = [rho](const cplx& q) { return -std::log(1.0 - rho * q); };
  V.radius = 1.0 / rho;
  V.poles = {cplx(1.0 / rho)};
  return V;
}

TransformEvaluator exponential() {
  TransformEvaluator V;
  V.eval = [](const cplx& q) { return std::exp(q); };
  V.log_eval = [](const cplx& q) { return q; };
  V.bound_kind = sinhz::BoundKind::entire;
  return V;
}

TransformEvaluator two_poles() {
  TransformEvaluator V;
  V.eval = [](const cplx& q) { return 1.0 / ((1.0 - q) * (1.0 - q / 3.0)); };
  V.poles = {cplx(1.0), cplx(3.0)};
  return V;
}

sinhz::TrapPlan circle(double r, int N) {
  sinhz::TrapPlan p;
  p.r = r;
  p.N = N;
  return p;
}

TEST(InvertTrapezoid, GeometricSeries) {
  const auto v = sinhz::invert_trapezoid(geometric(0.5), 3, circle(0.5, 64));
  EXPECT_NEAR(v.value().real(), 0.125, 1e-12);
}

TEST(InvertTrapezoid, TaylorCoefficientOfExp) {
  const auto v = sinhz::invert_trapezoid(exponential(), 5, circle(0.9, 64));
  EXPECT_NEAR(v.value().real(), 1.0 / 120.0, 1e-10);
}

TEST(InvertTrapezoid, PoleAtOneWithPlannedContour) {
  for (int n : {10, 100, 1260}) {
    const auto plan = sinhz::choose_trap_params(1e-12, n, sinhz::auto_M(1e-12));
    EXPECT_NEAR(sinhz::invert_trapezoid(geometric(1.0), n, plan).value().real(), 1.0, 1e-11) << n;
  }
}

TEST(TrapezoidErrorBound, MonotoneInNodeCount) {
  auto plan = sinhz::choose_trap_params(1e-10, 100, 10.0);
  double prev = INFINITY;
  for (int N = 200; N <= 2000; N += 200) {
    plan.N = N;
    const double b = sinhz::trapezoid_error_bound(geometric(1.0), 100, plan);
    EXPECT_LT(b, prev);
    prev = b;
  }
}

TEST(TrapezoidErrorBound, DominatesActualError) {
  sinhz::TrapPlan plan = circle(0.9, 0);
  plan.rho = 1.05;
  for (int N : {120, 200, 300, 400}) {
    plan.N = N;
    const double err = std::abs(sinhz::invert_trapezoid(geometric(1.0), 100, plan).value().real() - 1.0);
    EXPECT_GE(sinhz::trapezoid_error_bound(geometric(1.0), 100, plan), err) << N;
  }
}

TEST(TrapezoidErrorBound, DivergesAsAnnulusCollapses) {
  sinhz::TrapPlan plan = circle(0.9, 400);
  plan.rho = 1.0 + 1e-9;
  EXPECT_GT(sinhz::trapezoid_error_bound(geometric(1.0), 100, plan), 1e6);
}

TEST(ChooseTrapParams, ReferenceNodeCount) {
  const auto p = sinhz::choose_trap_params(1e-15, 1260, 23.0);
  EXPECT_NEAR(p.N_approx, 4412.0, 1.0);
  EXPECT_NEAR(p.r, std::exp(-23.0 / 1260), 1e-15);
}

TEST(ChooseTrapParams, ApproximateCountDecreasesInM) {
  double prev = INFINITY;
  for (double M = 2; M <= 40; M += 2) {
    const double N = sinhz::choose_trap_params(1e-15, 1260, M).N_approx;
    EXPECT_LT(N, prev);
    EXPECT_GT(N, 2.0 * 1260);
    prev = N;
  }
}

TEST(ChooseTrapParams, SmallIndexUsesExactBound) {
  const auto p = sinhz::choose_trap_params(1e-12, 1, 1.0);
  EXPECT_EQ(p.N, std::max(static_cast<int>(std::ceil(p.N_exact)), 2));
  EXPECT_GT(std::abs(p.N_exact - p.N_approx), 1.0);
  EXPECT_NEAR(sinhz::invert_trapezoid(geometric(1.0), 1, p).value().real(), 1.0, 1e-11);
}

TEST(ChooseSinhParams, ReferenceStepAndRadii) {
  sinhz::TransformInfo info;
  sinhz::SinhOptions opt;
  opt.family = sinhz::SinhFamily::sector_a;
  const auto plan = sinhz::choose_sinh_params(info, 1e-15, 1260, 23.0, opt);
  const double E = std::log(1e15);
  const double pi = std::numbers::pi;
  const auto& c = plan.contour;
  EXPECT_NEAR(c.d, 0.85 * pi / 8, 1e-3);
  EXPECT_NEAR(plan.hardy_log_formula, 46.0 + std::log(1260.0), 1e-12);
  EXPECT_NEAR(2.0 * pi * c.d / (E + plan.hardy_log_formula), 0.02392, 2e-5);
  // The step actually used follows the sampled Hardy norm, which the dip of the hyperbola inflates.
  EXPECT_NEAR(c.zeta, 2.0 * pi * c.d / (E + plan.hardy_log), 1e-12);
  EXPECT_GT(plan.hardy_log, plan.hardy_log_formula);
  EXPECT_NEAR(c.sigma - c.b * std::sin(c.omega + c.d), 0.96591, 1e-5);
  EXPECT_NEAR(c.sigma - c.b * std::sin(c.omega - c.d), 0.99818, 1e-5);
  EXPECT_NEAR(plan.predicted_terms, 154, 2);
}

TEST(InvertSinh, GeometricUnderflowsDoubleButNotScaledValue) {
  const auto v = sinhz::invert(geometric(0.5), 1000, 1e-12);
  const long double exact = -1000.0L * std::log(2.0L);
  EXPECT_LT(std::abs(std::expm1(static_cast<double>(v.log_abs() - exact))), 1e-10);
  EXPECT_GT(v.mantissa.real(), 0.0);
}

TEST(InvertSinh, PoleAtOne) {
  for (int n : {10, 100, 1260}) {
    const auto v = sinhz::invert(geometric(1.0), n, 1e-13);
    EXPECT_NEAR(v.value().real(), 1.0, 1e-12) << n;
  }
}

TEST(InvertSinh, PartialFractions) {
  const auto v = sinhz::invert(two_poles(), 50, 1e-13);
  const double exact = sinhz::oracle_zinv_series(sinhz::SeriesKind::partial_fraction, 50).value();
  EXPECT_NEAR(exact, 1.5 * (1.0 - std::pow(3.0, -51)), 1e-15);
  EXPECT_NEAR(v.value().real(), exact, 1e-12 * exact);
}

TEST(InvertSinh, EntireTransformReciprocalFactorial) {
  const int n = 300;
  const auto v = sinhz::invert(exponential(), n, 1e-12);
  const long double exact = -std::lgamma(static_cast<long double>(n + 1));
  EXPECT_LT(std::abs(std::expm1(static_cast<double>(v.log_abs() - exact))), 1e-10);
}

TEST(GainFactor, ReferenceValues) {
  EXPECT_NEAR(sinhz::gain_factor(1e-15, 1260, 23.0), 13.684, 1e-3);
  EXPECT_NEAR(sinhz::gain_factor(1e-15, 3780, 23.0), 32.213, 1e-3);
  EXPECT_NEAR(sinhz::gain_factor(1e-15, 7560, 23.0), 56.719, 1e-3);
}

TEST(GainFactor, RejectsTinyRatio) { EXPECT_THROW(sinhz::gain_factor(1e-15, 50, 23.0), sinhz::PreconditionError); }

TEST(ResolventBound, SelfAdjointAtOrigin) {
  EXPECT_DOUBLE_EQ(sinhz::resolvent_bound(0.0, 1.0, 0.0, sinhz::ResolventKind::self_adjoint), 4.0);
}

TEST(ResolventBound, NormalSectorOnRay) {
  const cplx q = std::polar(2.0, std::numbers::pi - 0.5);
  const double b = sinhz::resolvent_bound(q, 1.0, 0.1, sinhz::ResolventKind::normal_sector, 0.4);
  EXPECT_NEAR(b, 1.0 / std::sin(0.3), 1e-14);
}

TEST(ResolventBound, OutsideRegionRejected) {
  EXPECT_THROW(sinhz::resolvent_bound(1.5, 1.0, 0.0, sinhz::ResolventKind::self_adjoint), sinhz::DomainError);
}

TEST(AutoM, ClampedRange) {
  EXPECT_GE(sinhz::auto_M(1e-3), 1.0);
  EXPECT_LE(sinhz::auto_M(1e-15), 23.0);
  EXPECT_LE(sinhz::auto_M(1e-15), sinhz::auto_M(1e-8));
}

}  // namespace
