#include <gtest/gtest.h>

#include <random>

#include "sinhz/errors.hpp"
#include "sinhz/wh.hpp"
#include "test_models.hpp"

namespace {

using sinhz::cplx;
using sinhz::FlatLine;
using sinhz::WHContext;
namespace st = sinhz::testing;

cplx rhs(const sinhz::LevyModel& m, cplx q, cplx xi) { return (1.0 - q) / (1.0 - q * m.phi(xi)); }

TEST(WHFactors, UnitAtOrigin) {
  const auto m = st::symmetric_kobol();
  const WHContext ctx(m, 0.5, FlatLine{-0.45}, FlatLine{0.45});
  EXPECT_LT(std::abs(sinhz::wh_plus(ctx, 0.0) - 1.0), 1e-15);
  EXPECT_LT(std::abs(sinhz::wh_minus(ctx, 0.0) - 1.0), 1e-15);
}

TEST(WHFactors, TrivialAtZeroDiscount) {
  const auto m = st::nig();
  const WHContext ctx(m, 0.0, FlatLine{0.05}, FlatLine{0.95});
  for (cplx xi : {cplx(1.0, 0.5), cplx(-3.0, 0.3), cplx(10.0, 0.7)}) {
    EXPECT_EQ(sinhz::wh_plus(ctx, xi), cplx(1.0));
    EXPECT_EQ(sinhz::wh_minus(ctx, xi), cplx(1.0));
    EXPECT_EQ(sinhz::wh_continue(ctx, xi, sinhz::WHFactor::plus), cplx(1.0));
  }
}

TEST(WHFactors, FactorizationIdentity) {
  const auto m = st::symmetric_kobol();
  const cplx q = 0.5;
  const WHContext ctx(m, q, FlatLine{-0.45}, FlatLine{0.45});
  const cplx xi(1.0, -0.2);
  EXPECT_LT(std::abs(sinhz::wh_plus(ctx, xi) * sinhz::wh_minus(ctx, xi) - rhs(m, q, xi)), 1e-10);
}

TEST(WHFactors, IdentityForSkewedModelAndComplexQ) {
  const auto m = st::nig();
  const double c = -*m.symmetrizing_beta();
  for (cplx q : {cplx(0.9), cplx(0.3, 0.3)}) {
    const WHContext ctx(m, q, FlatLine{c - 0.45}, FlatLine{c + 0.45});
    for (double t = -15.0; t <= 15.0; t += 2.5) {
      const cplx xi(t, c + 0.1);
      EXPECT_LT(std::abs(sinhz::wh_plus(ctx, xi) * sinhz::wh_minus(ctx, xi) - rhs(m, q, xi)), 1e-9) << t;
    }
  }
}

TEST(WHFactors, MirrorSymmetryAboutSymmetryLine) {
  // Phi is even about Im xi = c, so phi^-(t + ic) and phi^+(-t + ic) differ only by the normalization
  // at xi = 0, i.e. their ratio does not depend on t.
  const auto m = st::nig();
  const double c = -*m.symmetrizing_beta();
  const WHContext ctx(m, 0.7, FlatLine{c - 0.45}, FlatLine{c + 0.45});
  auto ratio = [&](double t) { return sinhz::wh_minus(ctx, cplx(t, c)) / sinhz::wh_plus(ctx, cplx(-t, c)); };
  const cplx r0 = ratio(0.0);
  for (double t : {0.3, 1.7, 4.0, 12.0}) EXPECT_LT(std::abs(ratio(t) - r0), 1e-10 * std::abs(r0)) << t;
}

TEST(WHContinue, AgreesWithDirectFormulaInOverlap) {
  const auto m = st::symmetric_kobol();
  const cplx q = 0.6;
  const WHContext ctx(m, q, FlatLine{-0.45}, FlatLine{0.45});
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> re(-20.0, 20.0), im(-0.35, 0.35);
  for (int k = 0; k < 20; ++k) {
    const cplx xi(re(gen), im(gen));
    const cplx p = sinhz::wh_plus(ctx, xi);
    const cplx mi = sinhz::wh_minus(ctx, xi);
    EXPECT_LT(std::abs(sinhz::wh_continue(ctx, xi, sinhz::WHFactor::plus) - p), 1e-10 * std::abs(p));
    EXPECT_LT(std::abs(sinhz::wh_continue(ctx, xi, sinhz::WHFactor::minus) - mi), 1e-10 * std::abs(mi));
    EXPECT_LT(std::abs(sinhz::wh_continue(ctx, xi, sinhz::WHFactor::plus) * mi - rhs(m, q, xi)), 1e-10);
  }
}

TEST(WHContinue, ReachesBelowTheContour) {
  // phi^+ continued below the minus contour equals phi^+ computed with a lower contour.
  const auto m = st::symmetric_kobol();
  const cplx q = 0.6;
  const WHContext high(m, q, FlatLine{-0.3}, FlatLine{0.45});
  const WHContext low(m, q, FlatLine{-2.0}, FlatLine{0.45});
  for (cplx xi : {cplx(0.5, -1.0), cplx(-3.0, -0.8)}) {
    const cplx cont = sinhz::wh_continue(high, xi, sinhz::WHFactor::plus);
    const cplx direct = sinhz::wh_plus(low, xi);
    EXPECT_LT(std::abs(cont - direct), 1e-9 * std::abs(direct));
  }
}

TEST(WHVpLine, MatchesContourFactorsOnTheLine) {
  const auto m = st::symmetric_kobol();
  const double q = 0.5;
  const WHContext ctx(m, q, FlatLine{-0.45}, FlatLine{0.45});
  for (double t : {-6.0, -1.0, 0.4, 2.5, 9.0}) {
    const auto [p, mi] = sinhz::wh_vp_line(m, q, cplx(t, 0.0));
    const cplx pp = sinhz::wh_plus(ctx, cplx(t, 0.0));
    const cplx mm = sinhz::wh_minus(ctx, cplx(t, 0.0));
    EXPECT_LT(std::abs(p - pp), 1e-6 * std::abs(pp)) << t;
    EXPECT_LT(std::abs(mi - mm), 1e-6 * std::abs(mm)) << t;
    EXPECT_LT(std::abs(p * mi - rhs(m, q, t)), 1e-8) << t;
  }
}

TEST(WHVpLine, TrivialAtZeroDiscount) {
  const auto [p, mi] = sinhz::wh_vp_line(st::symmetric_kobol(), 0.0, cplx(1.0, 0.0));
  EXPECT_EQ(p, cplx(1.0));
  EXPECT_EQ(mi, cplx(1.0));
}

TEST(WHContext, RejectsContourThroughBranchCut) {
  // q = 1 makes 1 - q Phi vanish at the origin, which both flat lines avoid; q = 1.5 does not.
  const auto m = st::brownian(0.1);
  EXPECT_THROW(WHContext(m, 1.5, FlatLine{-0.45}, FlatLine{0.45}), sinhz::Error);
}

}  // namespace
