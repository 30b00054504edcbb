#include "sinhz/contours.hpp"

#include <cmath>
#include <sstream>

#include "sinhz/errors.hpp"

namespace sinhz {

namespace {

void check_strip(double im_y, double d, const char* who) {
  if (!(std::abs(im_y) < d)) {
    std::ostringstream os;
    os << who << ": |Im y| = " << std::abs(im_y) << " outside strip half-width " << d;
    throw DomainError(os.str());
  }
}

bool admissible_angle(double a) { return a > -kPi / 2 && a < kPi / 2; }

}  // namespace

cplx chi_z_eval(const SinhZContour& c, cplx y) {
  check_strip(y.imag(), c.d, "chi_z_eval");
  return c.sigma + kI * c.b * std::sinh(kI * c.omega + y);
}

cplx chi_z_deriv(const SinhZContour& c, cplx y) {
  check_strip(y.imag(), c.d, "chi_z_deriv");
  return kI * c.b * std::cosh(kI * c.omega + y);
}

cplx chi_xi_eval(const SinhXiContour& c, cplx y) {
  if (c.d > 0) check_strip(y.imag(), c.d, "chi_xi_eval");
  return kI * c.omega1 + c.b * std::sinh(kI * c.omega + y);
}

cplx chi_xi_deriv(const SinhXiContour& c, cplx y) {
  if (c.d > 0) check_strip(y.imag(), c.d, "chi_xi_deriv");
  return c.b * std::cosh(kI * c.omega + y);
}

SinhZContour build_z_contour(const AnnulusSpec& a, double omega, double d) {
  if (!(a.r_minus > 0 && a.r_minus < a.r_plus && a.r_plus < 1)) {
    throw PreconditionError("build_z_contour: need 0 < r_minus < r_plus < 1");
  }
  if (!(d > 0) || !admissible_angle(omega - d) || !admissible_angle(omega + d)) {
    throw PreconditionError("build_z_contour: omega +- d must lie in (-pi/2, pi/2)");
  }
  const double denom = 2.0 * std::cos(omega) * std::sin(d);
  SinhZContour c;
  c.omega = omega;
  c.d = d;
  c.b = (a.r_plus - a.r_minus) / denom;
  c.sigma = ((a.r_plus - a.r_minus) * std::sin(omega) * std::cos(d) +
             (a.r_plus + a.r_minus) * std::cos(omega) * std::sin(d)) /
            denom;
  return c;
}

ZContourReport validate_z_contour(const SinhZContour& c, double gamma, int samples,
                                  std::optional<double> span) {
  ZContourReport rep;
  const double L = span.value_or(c.Lambda + 2.0);
  const int m = std::max(samples, 3) | 1;  // odd count keeps y = 0 on the grid
  rep.inside_region = true;
  rep.worst_angle_margin = INFINITY;
  rep.left_distance = INFINITY;
  for (int side = -1; side <= 1; side += 2) {
    for (int k = 0; k < m; ++k) {
      const double y = -L + 2.0 * L * k / (m - 1);
      const cplx q = c.sigma + kI * c.b * std::sinh(cplx(y, c.omega + side * c.d));
      if (side == 1) rep.left_distance = std::min(rep.left_distance, std::abs(q));
      if (std::abs(q) < 1.0) continue;
      const double margin = std::abs(std::arg(q)) - gamma;
      rep.worst_angle_margin = std::min(rep.worst_angle_margin, margin);
      if (!(margin > 0)) rep.inside_region = false;
    }
  }
  rep.r_minus = c.sigma - c.b * std::sin(c.omega + c.d);
  rep.left_distance_ok = rep.left_distance >= rep.r_minus * (1.0 - 1e-10);
  return rep;
}

}  // namespace sinhz
