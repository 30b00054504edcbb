#include <boost/math/special_functions/legendre.hpp>
#include <map>
#include <memory>
#include <mutex>

#include "sinhz/errors.hpp"
#include "sinhz/numeric.hpp"

namespace sinhz {

const GaussRule& gauss_legendre(int order) {
  static std::mutex mtx;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  if (order < 1) throw PreconditionError("gauss_legendre: order >= 1 required");
  std::lock_guard lock(mtx);
  auto& slot = cache[order];
  if (!slot) {
    auto rule = std::make_unique<GaussRule>();
    // Boost returns the non-negative zeros in ascending order.
    const std::vector<double> pos = boost::math::legendre_p_zeros<double>(order);
    std::vector<double> xs;
    for (auto it = pos.rbegin(); it != pos.rend(); ++it) {
      if (*it != 0.0) xs.push_back(-*it);
    }
    for (double z : pos) xs.push_back(z);
    for (double z : xs) {
      const double dp = boost::math::legendre_p_prime(order, z);
      rule->x.push_back(z);
      rule->w.push_back(2.0 / ((1.0 - z * z) * dp * dp));
    }
    slot = std::move(rule);
  }
  return *slot;
}

}  // namespace sinhz
