#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_complex.hpp>
#include <numbers>

#include "sinhz/contours.hpp"
#include "sinhz/errors.hpp"

namespace {

using sinhz::cplx;
using Big = boost::multiprecision::cpp_complex_50;
constexpr double pi = std::numbers::pi;

Big big_i() { return Big(0, 1); }

TEST(ChiZ, VertexOfSymmetricContourIsSigma) {
  const sinhz::SinhZContour c{1.0, 1.0, 0.0, 0.3};
  EXPECT_EQ(sinhz::chi_z_eval(c, 0.0), cplx(1.0, 0.0));
}

TEST(ChiZ, TiltedVertexShiftsBySinOmega) {
  const sinhz::SinhZContour c{1.0, 1.0, pi / 8, 0.3};
  const cplx v = sinhz::chi_z_eval(c, 0.0);
  EXPECT_NEAR(v.real(), 1.0 - std::sin(pi / 8), 1e-15);
  EXPECT_NEAR(v.imag(), 0.0, 1e-15);
  EXPECT_NEAR(v.real(), 0.61732, 1e-5);
}

TEST(ChiZ, MatchesMultiprecisionClosedForm) {
  const sinhz::SinhZContour c{0.9908, 0.05327, pi / 8, 0.3};
  for (cplx y : {cplx(2.0, 0.0), cplx(-3.5, 0.2), cplx(7.0, -0.25)}) {
    const Big by(y.real(), y.imag());
    const Big ref = Big(c.sigma) + big_i() * Big(c.b) * sinh(big_i() * Big(c.omega) + by);
    const cplx v = sinhz::chi_z_eval(c, y);
    const double scale = std::abs(v);
    EXPECT_NEAR(v.real(), ref.real().convert_to<double>(), 4e-16 * scale);
    EXPECT_NEAR(v.imag(), ref.imag().convert_to<double>(), 4e-16 * scale);
  }
}

TEST(ChiZ, DerivativeMatchesFiniteDifference) {
  const sinhz::SinhZContour c{0.9908, 0.05327, pi / 8, 0.3};
  const cplx y(1.3, 0.1);
  const double h = 1e-6;
  const cplx fd = (sinhz::chi_z_eval(c, y + h) - sinhz::chi_z_eval(c, y - h)) / (2 * h);
  EXPECT_LT(std::abs(fd - sinhz::chi_z_deriv(c, y)), 1e-8);
}

TEST(ChiXi, VertexSitsAtIOmega1) {
  const sinhz::SinhXiContour c{-0.5, 1.0, 0.0, 0.3};
  const cplx v = sinhz::chi_xi_eval(c, 0.0);
  EXPECT_NEAR(v.real(), 0.0, 1e-16);
  EXPECT_NEAR(v.imag(), -0.5, 1e-16);
}

TEST(ChiXi, TiltedVertexWithoutShift) {
  const sinhz::SinhXiContour c{0.0, 2.0, pi / 6, 0.3};
  const cplx v = sinhz::chi_xi_eval(c, 0.0);
  EXPECT_NEAR(v.real(), 0.0, 1e-15);
  EXPECT_NEAR(v.imag(), 1.0, 1e-15);
}

TEST(ChiXi, MatchesMultiprecisionClosedForm) {
  const sinhz::SinhXiContour c{-0.5, 1.0, -pi / 6, 0.3};
  const Big ref = big_i() * Big(-0.5) + Big(1.0) * sinh(big_i() * Big(-pi / 6) + Big(1.2));
  const cplx v = sinhz::chi_xi_eval(c, 1.2);
  EXPECT_NEAR(v.real(), ref.real().convert_to<double>(), 1e-15);
  EXPECT_NEAR(v.imag(), ref.imag().convert_to<double>(), 1e-15);
}

TEST(BuildZContour, ReferenceAnnulus) {
  const double d = 0.33379;
  const auto c = sinhz::build_z_contour(0.96591, 0.99818, pi / 8, d);
  EXPECT_NEAR(c.b, 0.05327, 5e-5);
  EXPECT_NEAR(c.sigma - c.b * std::sin(c.omega - d), 0.99818, 1e-14);
  EXPECT_NEAR(c.sigma - c.b * std::sin(c.omega + d), 0.96591, 1e-14);
}

TEST(BuildZContour, DefiningEquationsOnRandomInputs) {
  for (int k = 0; k < 20; ++k) {
    const double rp = 0.9 + 0.005 * k;
    const double rm = rp - 0.01 - 0.002 * k;
    const double om = -0.3 + 0.03 * k;
    const double d = 0.2 + 0.01 * k;
    const auto c = sinhz::build_z_contour(rm, rp, om, d);
    EXPECT_NEAR(c.sigma - c.b * std::sin(om - d), rp, 1e-14 * rp);
    EXPECT_NEAR(c.sigma - c.b * std::sin(om + d), rm, 1e-14 * rm);
  }
}

TEST(BuildZContour, DegenerateAnnulusRejected) {
  EXPECT_THROW(sinhz::build_z_contour(0.99, 0.99, pi / 8, 0.3), sinhz::PreconditionError);
  EXPECT_THROW(sinhz::build_z_contour(0.999, 0.99, pi / 8, 0.3), sinhz::PreconditionError);
}

TEST(ValidateZContour, ReferenceContourStaysInAdmissibleRegion) {
  auto c = sinhz::build_z_contour(0.96591, 0.99818, pi / 8, 0.33379);
  c.zeta = 0.02392;
  c.N = 154;
  c.Lambda = c.N * c.zeta;
  const auto rep = sinhz::validate_z_contour(c, 0.05);
  EXPECT_TRUE(rep.inside_region);
  EXPECT_GT(rep.worst_angle_margin, 0.0);
  EXPECT_NEAR(rep.r_minus, 0.96591, 1e-14);
}

// On the line Im y = d, |chi|^2 = (sigma - B cosh t)^2 + C^2 sinh^2 t with B = b sin(omega + d),
// C = b cos(omega + d). The minimum sits at the vertex only when b >= sigma sin(omega + d);
// otherwise it is cos(omega + d) sqrt(sigma^2 - b^2) < r_-.
TEST(ValidateZContour, LeftBoundaryDistanceMatchesClosedForm) {
  auto c = sinhz::build_z_contour(0.96591, 0.99818, pi / 8, 0.33379);
  c.zeta = 0.02392;
  c.N = 154;
  c.Lambda = c.N * c.zeta;
  ASSERT_LT(c.b, c.sigma * std::sin(c.omega + c.d));
  const auto rep = sinhz::validate_z_contour(c, 0.05, 200001);
  const double exact = std::cos(c.omega + c.d) * std::sqrt(c.sigma * c.sigma - c.b * c.b);
  EXPECT_NEAR(rep.left_distance, exact, 1e-8);
  EXPECT_FALSE(rep.left_distance_ok);
  EXPECT_FALSE(rep.ok());
}

TEST(ValidateZContour, VertexIsNearestWhenScaleIsLarge) {
  // b >= sigma sin(omega + d): the left boundary is closest to the origin at its vertex r_-.
  auto c = sinhz::build_z_contour(0.2, 0.9, 0.05, 0.1);
  c.zeta = 0.1;
  c.N = 30;
  c.Lambda = c.N * c.zeta;
  ASSERT_GE(c.b, c.sigma * std::sin(c.omega + c.d));
  const auto rep = sinhz::validate_z_contour(c, 0.05);
  EXPECT_NEAR(rep.left_distance, 0.2, 1e-10);
  EXPECT_TRUE(rep.left_distance_ok);
}

TEST(ValidateZContour, WideOpeningNearUnitCircleFails) {
  // omega + d >= pi/4: the convexity argument for the left-boundary distance breaks down.
  auto c = sinhz::build_z_contour(0.9, 0.99999, pi / 4, 0.2);
  c.zeta = 0.05;
  c.N = 200;
  c.Lambda = c.N * c.zeta;
  EXPECT_FALSE(sinhz::validate_z_contour(c, 0.05).ok());
}

TEST(ValidateZContour, RightBoundaryLeavingDiscNearPositiveAxisFails) {
  // omega - d < 0 bends the right boundary outwards at small |arg q| just beyond r_+ ~ 1.
  auto c = sinhz::build_z_contour(0.9, 0.999, -0.1, 0.2);
  c.zeta = 0.05;
  c.N = 200;
  c.Lambda = c.N * c.zeta;
  const auto rep = sinhz::validate_z_contour(c, 0.05);
  EXPECT_FALSE(rep.inside_region);
  EXPECT_LT(rep.worst_angle_margin, 0.0);
}

TEST(ValidateZContour, VanishingScaleStaysInRegion) {
  auto c = sinhz::build_z_contour(0.99817, 0.99818, pi / 8, 0.33379);
  c.zeta = 0.1;
  c.N = 20;
  c.Lambda = c.N * c.zeta;
  EXPECT_LT(c.b, 1e-4);
  EXPECT_TRUE(sinhz::validate_z_contour(c, 0.05).inside_region);
}

TEST(ChiZ, SymmetricAboutRealAxis) {
  const auto c = sinhz::build_z_contour(0.96591, 0.99818, pi / 8, 0.33379);
  for (cplx y : {cplx(0.4, 0.1), cplx(-2.0, -0.3), cplx(5.0, 0.2)}) {
    const cplx mirrored = sinhz::chi_z_eval(c, -std::conj(y));
    const cplx v = sinhz::chi_z_eval(c, y);
    EXPECT_LT(std::abs(mirrored - std::conj(v)), 1e-15 * std::max(1.0, std::abs(v)));
  }
}

TEST(ChiZ, StripViolationRejected) {
  const sinhz::SinhZContour c{1.0, 1.0, 0.0, 0.3};
  EXPECT_THROW(sinhz::chi_z_eval(c, cplx(0.0, 0.31)), sinhz::DomainError);
}

}  // namespace
