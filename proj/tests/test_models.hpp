#pragma once

#include "sinhz/levy.hpp"

namespace sinhz::testing {

inline LevyModel symmetric_kobol(double c = 0.3, double nu = 0.5, double lambda = 8.0) {
  return LevyModel::kobol(KoBoLParams{c, c, nu, nu, -lambda, lambda, 0.0});
}

inline LevyModel nig(double alpha = 2.0, double beta = 0.5, double delta = 1.0, double mu = 0.0) {
  return LevyModel::nts(NTSParams{delta, alpha, beta, 1.0, mu});
}

inline LevyModel brownian(double d0 = 1.0, double mu = 0.0) { return LevyModel::quadratic(QuadraticParams{d0, mu}); }

}  // namespace sinhz::testing
