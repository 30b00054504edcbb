#include <gtest/gtest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sinhz/errors.hpp"
#include "sinhz/payoffs.hpp"

namespace {

using sinhz::cplx;

// int e^{-i x xi} G(x) dx over [lo, hi] by adaptive Gauss-Kronrod.
cplx fourier(const sinhz::PayoffTransform& p, cplx xi, double lo, double hi) {
  using boost::math::quadrature::gauss_kronrod;
  auto re = [&](double x) { return (std::exp(-cplx(0, 1) * x * xi) * p.value(x)).real(); };
  auto im = [&](double x) { return (std::exp(-cplx(0, 1) * x * xi) * p.value(x)).imag(); };
  return {gauss_kronrod<double, 31>::integrate(re, lo, hi, 15, 1e-13),
          gauss_kronrod<double, 31>::integrate(im, lo, hi, 15, 1e-13)};
}

TEST(Ghat, PutContinuedValue) {
  const auto p = sinhz::make_put(1.0);
  const cplx v = sinhz::ghat_eval(p, cplx(0, -0.5));
  EXPECT_NEAR(v.real(), -4.0, 1e-14);
  EXPECT_NEAR(v.imag(), 0.0, 1e-14);
}

TEST(Ghat, PutMatchesQuadratureInsideStrip) {
  const auto p = sinhz::make_put(1.0);
  for (cplx xi : {cplx(0.0, 0.5), cplx(1.5, 0.3), cplx(-2.0, 1.2)}) {
    const cplx ref = fourier(p, xi, -200.0, 0.0);
    EXPECT_LT(std::abs(sinhz::ghat_eval(p, xi) - ref), 1e-10);
  }
}

TEST(Ghat, DigitalUpMatchesQuadrature) {
  const auto p = sinhz::make_digital_up(0.0);
  const cplx v = sinhz::ghat_eval(p, cplx(0, -1));
  EXPECT_NEAR(v.real(), 1.0, 1e-14);
  EXPECT_NEAR(v.imag(), 0.0, 1e-14);
  EXPECT_LT(std::abs(fourier(p, cplx(0, -1), 0.0, 60.0) - v), 1e-12);
}

TEST(Ghat, DigitalDownAndCallMatchQuadrature) {
  const auto dd = sinhz::make_digital_down(0.3);
  const cplx xi_d(0.7, 0.4);
  EXPECT_LT(std::abs(fourier(dd, xi_d, -80.0, 0.3) - sinhz::ghat_eval(dd, xi_d)), 1e-10);
  const auto call = sinhz::make_call(1.2);
  const cplx xi_c(0.5, -2.0);
  EXPECT_LT(std::abs(fourier(call, xi_c, std::log(1.2), 40.0) - sinhz::ghat_eval(call, xi_c)), 1e-9);
}

TEST(Ghat, AmplitudeIsLinear) {
  const auto one = sinhz::make_digital_down(0.2, 1.0);
  const auto three = sinhz::make_digital_down(0.2, 3.0);
  const cplx xi(0.4, 0.6);
  EXPECT_LT(std::abs(sinhz::ghat_eval(three, xi) - 3.0 * sinhz::ghat_eval(one, xi)), 1e-14);
}

TEST(RegularityStrip, Edges) {
  EXPECT_EQ(sinhz::regularity_strip(sinhz::make_put(1.0)).first, 0.0);
  EXPECT_EQ(sinhz::regularity_strip(sinhz::make_call(1.0)).second, -1.0);
  EXPECT_EQ(sinhz::regularity_strip(sinhz::make_digital_up(0.0)).second, 0.0);
  EXPECT_EQ(sinhz::regularity_strip(sinhz::make_digital_down(0.0)).first, 0.0);
}

TEST(RegularityStrip, PutTransformDivergesBelowStrip) {
  // Along Im xi = -0.1 the integrand e^{-0.1 x}(K - e^x)_+ grows as x -> -inf.
  const auto p = sinhz::make_put(1.0);
  const cplx xi(0.0, -0.1);
  const double a = std::abs(fourier(p, xi, -40.0, 0.0));
  const double b = std::abs(fourier(p, xi, -80.0, 0.0));
  EXPECT_GT(b, 10.0 * a);
}

TEST(Damping, AdmissibleAndRejectedShifts) {
  const auto p = sinhz::make_put(1.0);
  EXPECT_NO_THROW(sinhz::check_damping(p, -0.5));
  EXPECT_THROW(sinhz::check_damping(p, 0.5), sinhz::PreconditionError);
}

TEST(Damping, EsscherPayoffShiftsTransform) {
  const auto p = sinhz::make_put(1.0);
  const auto q = sinhz::esscher_payoff(p, -0.5);
  const cplx xi(0.3, 0.2);
  EXPECT_LT(std::abs(sinhz::ghat_eval(q, xi) - sinhz::ghat_eval(p, xi - cplx(0, -0.5))), 1e-14);
}

TEST(Payoff, PointwiseValues) {
  EXPECT_DOUBLE_EQ(sinhz::make_put(1.0).value(-1.0), 1.0 - std::exp(-1.0));
  EXPECT_DOUBLE_EQ(sinhz::make_put(1.0).value(0.5), 0.0);
  EXPECT_DOUBLE_EQ(sinhz::make_digital_down(0.05, 2.0).value(0.0), 2.0);
  EXPECT_DOUBLE_EQ(sinhz::make_digital_down(0.05, 2.0).value(0.1), 0.0);
}

}  // namespace
