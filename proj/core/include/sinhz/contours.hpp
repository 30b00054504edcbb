#pragma once

#include <complex>
#include <optional>

#include "sinhz/numeric.hpp"

namespace sinhz {

// q = sigma + i b sinh(i omega + y); analytic for |Im y| < d.
struct SinhZContour {
  double sigma = 0.0;
  double b = 0.0;
  double omega = 0.0;
  double d = 0.0;
  double zeta = 0.0;
  int N = 0;
  double Lambda = 0.0;  // N * zeta
};

// xi = i omega1 + b sinh(i omega + y).
struct SinhXiContour {
  double omega1 = 0.0;
  double b = 1.0;
  double omega = 0.0;
  double d = 0.0;  // half-width of the analyticity strip in y
  double zeta = 0.0;
  int N = 0;
};

struct AnnulusSpec {
  double r_minus = 0.0;
  double r_plus = 0.0;
};

cplx chi_z_eval(const SinhZContour& c, cplx y);
cplx chi_z_deriv(const SinhZContour& c, cplx y);  // d chi / dy
cplx chi_xi_eval(const SinhXiContour& c, cplx y);
cplx chi_xi_deriv(const SinhXiContour& c, cplx y);

// Fits (sigma, b) so that the strip boundaries Im y = -d and Im y = +d cross the
// positive real axis at r_plus and r_minus respectively.
SinhZContour build_z_contour(const AnnulusSpec& annulus, double omega, double d);
inline SinhZContour build_z_contour(double r_minus, double r_plus, double omega, double d) {
  return build_z_contour(AnnulusSpec{r_minus, r_plus}, omega, d);
}

struct ZContourReport {
  bool inside_region = false;      // strip image inside (-C_{pi-gamma}) U D(0,1)
  double worst_angle_margin = 0.0;  // min over outside-disc samples of |arg q| - gamma
  double left_distance = 0.0;      // min |chi(y + i d)|
  double r_minus = 0.0;            // sigma - b sin(omega + d)
  bool left_distance_ok = false;
  bool ok() const { return inside_region && left_distance_ok; }
};

// Dense sampling of both boundary curves over |y| <= span (default Lambda + 2).
ZContourReport validate_z_contour(const SinhZContour& c, double gamma, int samples = 2001,
                                  std::optional<double> span = std::nullopt);

}  // namespace sinhz
