#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "sinhz/errors.hpp"
#include "sinhz/levelcurves.hpp"
#include "test_models.hpp"

namespace {

using sinhz::cplx;
namespace st = sinhz::testing;

TEST(TraceTrajectory, QuadraticHyperbola) {
  const auto m = st::brownian();
  const double delta = 0.3;
  const auto s = sinhz::trace_trajectory(m, cplx(0.5, delta / 1.0), delta, 40.0);
  ASSERT_GT(s.size(), 10u);
  EXPECT_GE(s.back().t, 40.0 - 1e-12);
  for (const auto& p : s) {
    EXPECT_NEAR(p.point.imag(), 0.15 / p.t, 1e-10) << p.t;
    EXPECT_NEAR(p.slope, -0.15 / (p.t * p.t), 1e-9) << p.t;
  }
}

TEST(TraceTrajectory, OffLevelStartRejected) {
  EXPECT_THROW(sinhz::trace_trajectory(st::brownian(), cplx(1.0, 0.5), 0.3, 10.0), sinhz::PreconditionError);
}

TEST(TraceTrajectory, KoBoLExponentAndPrefactor) {
  const auto m = st::symmetric_kobol();
  const double delta = 0.05;
  const auto c = sinhz::build_extended_curve(m, delta, 0.0, 1e4);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int k = 0;
  for (const auto& s : c.samples()) {
    if (s.t < 100.0) continue;
    const double X = std::log(s.t), Y = std::log(s.point.imag());
    sx += X;
    sy += Y;
    sxx += X * X;
    sxy += X * Y;
    ++k;
  }
  ASSERT_GT(k, 10);
  const double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  const auto& a = sinhz::asymptotic_params(m);
  EXPECT_NEAR(slope / (a.nu_bar + 1.0 - a.nu0), 1.0, 0.05);
  const double pref = std::exp((sy - slope * sx) / k);
  EXPECT_NEAR(pref / sinhz::p_delta(m, delta), 1.0, 0.10);
}

TEST(ExtendedCurve, QuadraticWingsAndVertex) {
  const auto m = st::brownian();
  const auto c = sinhz::build_extended_curve(m, 0.3, -0.5, 50.0);
  EXPECT_NEAR(c.point(0.0).real(), 0.0, 1e-15);
  EXPECT_NEAR(c.point(0.0).imag(), -0.5, 1e-15);
  EXPECT_NEAR(c.deriv(0.0).imag(), 0.0, 1e-14);
  double worst = 0.0;
  for (const auto& s : c.samples())
    if (s.t >= c.x_connect()) worst = std::max(worst, std::abs(s.point.imag() - 0.15 / s.t));
  EXPECT_LT(worst, 1e-10);
}

TEST(ExtendedCurve, ZeroLevelRejected) {
  EXPECT_THROW(sinhz::build_extended_curve(st::brownian(), 0.0, -0.5, 10.0), sinhz::PreconditionError);
}

TEST(ExtendedCurve, MirrorSymmetry) {
  const auto m = st::symmetric_kobol();
  const auto c = sinhz::build_extended_curve(m, 0.05, 0.0, 200.0);
  const auto& s = c.samples();
  for (size_t i = 0; i < s.size(); ++i) {
    const auto& a = s[i];
    const auto& b = s[s.size() - 1 - i];
    EXPECT_EQ(a.t, -b.t);
    EXPECT_EQ(a.point.imag(), b.point.imag());
    EXPECT_EQ(a.slope, -b.slope);
  }
}

TEST(ExtendedCurve, ResidualOnWingsBelowTraceTolerance) {
  const auto m = st::symmetric_kobol();
  const auto c = sinhz::build_extended_curve(m, 0.05, 0.0, 1e3);
  double worst = 0.0;
  for (const auto& s : c.samples())
    if (std::abs(s.t) >= c.x_connect()) worst = std::max(worst, std::abs(c.level_residual(m, s)));
  EXPECT_LE(worst, 1e-9);
}

TEST(FlattenCurve, BeyondTracedRangeIsIdentity) {
  const auto m = st::symmetric_kobol();
  const auto c = sinhz::build_extended_curve(m, 0.05, 0.0, 100.0);
  const auto f = sinhz::flatten_curve(m, c, 1e3);
  EXPECT_FALSE(f.flatten_at().has_value());
  ASSERT_EQ(f.samples().size(), c.samples().size());
  for (size_t i = 0; i < c.samples().size(); ++i) EXPECT_EQ(f.samples()[i].point, c.samples()[i].point);
}

TEST(FlattenCurve, FlatWingStaysBelowThreshold) {
  const auto m = st::symmetric_kobol();
  const double delta = 0.05, dstar = 0.3;
  const auto c = sinhz::build_extended_curve(m, delta, 0.0, 2e3);
  const auto f = sinhz::flatten_curve(m, c, 500.0, dstar);
  ASSERT_TRUE(f.flatten_at().has_value());
  const double ys = f.point(500.0).imag();
  double worst = 0.0;
  for (double x = 500.0; x < 5e5; x *= 1.01) {
    EXPECT_EQ(f.point(x).imag(), ys);
    worst = std::max(worst, std::abs(m.psi(f.point(x)).imag()));
  }
  EXPECT_LE(worst, dstar);
}

TEST(FlattenCurve, EarlyFlatteningReportsExcursion) {
  const auto m = st::symmetric_kobol(5.0);
  const auto c = sinhz::build_extended_curve(m, 0.05, 0.0, 100.0);
  const double x_star = std::max(1.0, c.x_connect());
  try {
    sinhz::flatten_curve(m, c, x_star, 0.1);
    FAIL() << "expected the flat wing to leave the admissible band";
  } catch (const sinhz::PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("max |Im psi|"), std::string::npos);
  }
}

TEST(StripWidth, QuadraticPositive) {
  const auto m = st::brownian();
  const auto c = sinhz::build_extended_curve(m, 0.3, -0.5, 50.0);
  EXPECT_GT(sinhz::strip_width_estimate(m, c), 0.0);
}

TEST(StripWidth, ShrinksNearCutEnd) {
  const auto m = st::symmetric_kobol();
  const auto centred = sinhz::build_extended_curve(m, 0.05, 0.0, 100.0);
  const auto hugging = sinhz::build_extended_curve(m, 0.05, 7.9, 100.0);
  const double dc = sinhz::strip_width_estimate(m, centred);
  const double dh = sinhz::strip_width_estimate(m, hugging);
  EXPECT_LT(dh, 0.1);
  EXPECT_LT(dh, dc);
}

TEST(StripWidth, FlatteningDoesNotWiden) {
  const auto m = st::symmetric_kobol();
  const auto c = sinhz::build_extended_curve(m, 0.05, 0.0, 2e3);
  const auto f = sinhz::flatten_curve(m, c, 500.0, 0.3);
  EXPECT_LE(sinhz::strip_width_estimate(m, f), sinhz::strip_width_estimate(m, c));
}

TEST(CurveCsv, StableHeaderAndResidualColumn) {
  const auto m = st::brownian();
  const auto c = sinhz::build_extended_curve(m, 0.3, -0.5, 10.0);
  std::ostringstream os;
  sinhz::write_curve_csv(os, m, c);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "t,re,im,segment,im_psi_residual");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, static_cast<int>(c.samples().size()));
}

}  // namespace
