#pragma once

#include <memory>
#include <mutex>
#include <utility>
#include <variant>
#include <vector>

#include "sinhz/contours.hpp"
#include "sinhz/levelcurves.hpp"
#include "sinhz/levy.hpp"

namespace sinhz {

// Horizontal line Im eta = omega (omega != 0).
struct FlatLine {
  double omega = 0.0;
};

using WHContour = std::variant<FlatLine, SinhXiContour, std::shared_ptr<const ExtendedCurve>>;

// Height of the contour above the abscissa x; used for the above/below preconditions.
double contour_height(const WHContour& c, double x);
// Whether the contour crosses iR above the origin.
bool contour_above_origin(const WHContour& c);

struct WHOptions {
  double eps = 1e-12;    // target relative accuracy of the factors
  double zeta0 = 0.25;   // coarsest trapezoid step in the sinh variable
  int gl_order = 8;      // Gauss-Legendre order per panel on curved contours
  int max_level = 10;    // step halvings allowed before ConvergenceError
};

struct WHNode {
  cplx eta;
  cplx wf;  // quadrature weight x d eta x (-log(1 - q Phi(eta)))
};

namespace detail {
// Lazily refined node sets of one contour; level L halves the step of level L-1.
class WHGrid {
 public:
  WHGrid(const LevyModel& m, cplx q, WHContour c, const WHOptions& opt);
  const std::vector<WHNode>& level(int L) const;
  const WHContour& contour() const { return contour_; }
  bool above_origin() const { return above_origin_; }
  // Integral of -log(1 - q Phi) K(., xi) along the contour, refined until stable.
  cplx integral(cplx xi) const;

 private:
  std::vector<WHNode> build(int L) const;
  cplx weight_f(cplx eta) const;
  LevyModel model_;
  cplx q_;
  WHContour contour_;
  WHOptions opt_;
  bool above_origin_ = false;
  double y_lo_ = 0.0, y_hi_ = 0.0;  // truncation of the sinh variable
  std::vector<double> panels_;      // breakpoints in t for curved contours
  mutable std::mutex mu_;
  mutable std::vector<std::unique_ptr<std::vector<WHNode>>> levels_;
  // Flat lines: the xi-independent part int -log(1 - q Phi) / eta, computed once.
  mutable std::once_flag origin_once_;
  mutable cplx origin_part_{};
};
}  // namespace detail

// phi^+ is integrated over `minus` (below xi), phi^- over `plus` (above xi).
// Construction samples both contours and rejects 1 - q Phi on (-inf, 0].
class WHContext {
 public:
  WHContext(const LevyModel& m, cplx q, WHContour minus, WHContour plus, WHOptions opt = {});
  const LevyModel& model() const { return model_; }
  cplx q() const { return q_; }
  const WHOptions& options() const { return opt_; }
  const detail::WHGrid& grid_minus() const { return *minus_; }
  const detail::WHGrid& grid_plus() const { return *plus_; }

 private:
  LevyModel model_;
  cplx q_;
  WHOptions opt_;
  std::unique_ptr<detail::WHGrid> minus_, plus_;
};

cplx wh_plus(const WHContext& ctx, cplx xi);
cplx wh_minus(const WHContext& ctx, cplx xi);

enum class WHFactor { plus, minus };
// Continuation through the factor identity: phi^+- = (1 - q) / ((1 - q Phi) phi^-+).
cplx wh_continue(const WHContext& ctx, cplx xi, WHFactor which);

// Principal-value evaluation on the line through xi; cross-check oracle for real q in (0, 1).
std::pair<cplx, cplx> wh_vp_line(const LevyModel& m, double q, cplx xi, double tol = 1e-12);

}  // namespace sinhz
