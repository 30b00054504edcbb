#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sinhz/levy.hpp"
#include "sinhz/payoffs.hpp"
#include "sinhz/pricing.hpp"
#include "sinhz/oracles.hpp"

namespace sinhz::tools {

// Invalid or incomplete configuration; `field` is a JSON pointer to the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& what) : std::runtime_error(what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct EngineConfig {
  double eps = 1e-10;
  int threads = 1;
};

nlohmann::json load_config(const std::string& path);

LevyModel parse_model(const nlohmann::json& j, const std::string& where = "/model");
PayoffTransform parse_payoff(const nlohmann::json& j, const std::string& where = "/payoff");
EngineConfig parse_engine(const nlohmann::json& root);
PricingRequest parse_price_request(const nlohmann::json& root);

struct TraceConfig {
  double delta = 0.05;
  std::optional<double> u;
  double x_max = 60.0;
  std::optional<double> flatten_at;
  double delta_star = 0.1;
};
TraceConfig parse_trace(const nlohmann::json& root);

struct BenchmarkPoint {
  int n = 0;
  double M = 0.0;
  double eps = 0.0;
};
struct BenchmarkConfig {
  SeriesKind transform = SeriesKind::pole_at_one;
  std::vector<BenchmarkPoint> grid;
};
// Defaults to the three reference rows (1260, 3780, 7560) at M = 23, eps = 1e-15.
BenchmarkConfig parse_benchmark(const nlohmann::json& root);

}  // namespace sinhz::tools
