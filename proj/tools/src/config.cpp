#include "sinhz_tools/config.hpp"

#include <fstream>
#include <thread>

#include "sinhz/errors.hpp"
#include "sinhz_tools/suites.hpp"

namespace sinhz::tools {

namespace {

using nlohmann::json;

const json& section(const json& root, const char* name) {
  if (!root.is_object() || !root.contains(name)) throw ConfigError(std::string("/") + name, std::string("missing section '") + name + "'");
  const json& s = root.at(name);
  if (!s.is_object()) throw ConfigError(std::string("/") + name, std::string("section '") + name + "' must be an object");
  return s;
}

double num(const json& j, const std::string& where, const char* key, std::optional<double> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(where + "/" + key, std::string("missing field '") + key + "'");
  }
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(where + "/" + key, std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

int integer(const json& j, const std::string& where, const char* key, std::optional<int> fallback = std::nullopt) {
  if (!j.contains(key)) {
    if (fallback) return *fallback;
    throw ConfigError(where + "/" + key, std::string("missing field '") + key + "'");
  }
  const json& v = j.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + "/" + key, std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

std::string str(const json& j, const std::string& where, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string())
    throw ConfigError(where + "/" + key, std::string("missing string field '") + key + "'");
  return j.at(key).get<std::string>();
}

}  // namespace

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("config is not valid JSON: ") + e.what());
  }
}

LevyModel parse_model(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where, "model must be an object");
  const std::string type = str(j, where, "type");
  try {
    if (type == "kobol" || type == "cgmy") {
      KoBoLParams p;
      const double c = num(j, where, "c", 1.0);
      const double nu = num(j, where, "nu", 0.5);
      p.c_plus = num(j, where, "c_plus", c);
      p.c_minus = num(j, where, "c_minus", c);
      p.nu_plus = num(j, where, "nu_plus", nu);
      p.nu_minus = num(j, where, "nu_minus", nu);
      p.lambda_minus = num(j, where, "lambda_minus");
      p.lambda_plus = num(j, where, "lambda_plus");
      p.mu = num(j, where, "mu", 0.0);
      return LevyModel::kobol(p);
    }
    if (type == "nts" || type == "nig") {
      NTSParams p;
      p.delta_s = num(j, where, "delta_s", 1.0);
      p.alpha_s = num(j, where, "alpha_s");
      p.beta_s = num(j, where, "beta_s", 0.0);
      p.nu_s = type == "nig" ? 1.0 : num(j, where, "nu_s", 1.0);
      p.mu = num(j, where, "mu", 0.0);
      return LevyModel::nts(p);
    }
    if (type == "quadratic" || type == "gaussian") {
      QuadraticParams p;
      p.d0 = num(j, where, "d0", 1.0);
      p.mu = num(j, where, "mu", 0.0);
      return LevyModel::quadratic(p);
    }
    if (type == "mixture") {
      if (!j.contains("components") || !j.at("components").is_array() || j.at("components").size() != 2)
        throw ConfigError(where + "/components", "mixture needs exactly two components");
      const double a0 = num(j, where, "a0"), a1 = num(j, where, "a1");
      return LevyModel::mixture(a0, parse_model(j.at("components")[0], where + "/components/0"), a1,
                                parse_model(j.at("components")[1], where + "/components/1"));
    }
  } catch (const Error& e) {
    throw ConfigError(where, e.what());
  }
  throw ConfigError(where + "/type", "unsupported model type '" + type + "'");
}

PayoffTransform parse_payoff(const json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where, "payoff must be an object");
  const std::string kind = str(j, where, "kind");
  PayoffTransform p;
  try {
    if (kind == "put") {
      p = make_put(num(j, where, "strike"));
    } else if (kind == "call") {
      p = make_call(num(j, where, "strike"));
    } else if (kind == "digital_up" || kind == "digital_down") {
      const double level = num(j, where, "level");
      const double amp = num(j, where, "amplitude", 1.0);
      p = kind == "digital_up" ? make_digital_up(level, amp) : make_digital_down(level, amp);
    } else {
      throw ConfigError(where + "/kind", "unsupported payoff kind '" + kind + "'");
    }
    if (j.contains("beta")) check_damping(p, num(j, where, "beta"));
  } catch (const Error& e) {
    throw ConfigError(where, e.what());
  }
  return p;
}

EngineConfig parse_engine(const json& root) {
  EngineConfig e;
  e.threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (!root.contains("engine")) return e;
  const json& s = section(root, "engine");
  e.eps = num(s, "/engine", "eps", e.eps);
  e.threads = integer(s, "/engine", "threads", e.threads);
  if (!(e.eps > 0 && e.eps < 1)) throw ConfigError("/engine/eps", "eps must lie in (0, 1)");
  if (e.threads < 1) throw ConfigError("/engine/threads", "threads must be positive");
  return e;
}

PricingRequest parse_price_request(const json& root) {
  PricingRequest req(parse_model(section(root, "model")), parse_payoff(section(root, "payoff")));
  const json& r = section(root, "request");
  req.n = integer(r, "/request", "n");
  if (req.n < 0) throw ConfigError("/request/n", "n must be non-negative");
  req.q0 = num(r, "/request", "q0", 1.0);
  if (!(req.q0 > 0 && req.q0 <= 1)) throw ConfigError("/request/q0", "q0 must lie in (0, 1]");
  req.x = num(r, "/request", "x", 0.0);
  if (r.contains("barrier") && !r.at("barrier").is_null()) req.barrier = num(r, "/request", "barrier");
  if (r.contains("mode")) {
    const std::string mode = str(r, "/request", "mode");
    if (mode == "auto") {
      req.mode = PricingMode::auto_select;
    } else if (mode == "symmetric") {
      req.mode = PricingMode::symmetric;
    } else if (mode == "nonsymmetric") {
      req.mode = PricingMode::nonsymmetric;
    } else {
      throw ConfigError("/request/mode", "mode must be auto, symmetric or nonsymmetric");
    }
  }
  const EngineConfig e = parse_engine(root);
  req.eps = e.eps;
  req.threads = e.threads;
  return req;
}

TraceConfig parse_trace(const json& root) {
  TraceConfig t;
  if (!root.contains("trace")) return t;
  const json& s = section(root, "trace");
  t.delta = num(s, "/trace", "delta", t.delta);
  if (s.contains("u")) t.u = num(s, "/trace", "u");
  t.x_max = num(s, "/trace", "x_max", t.x_max);
  if (s.contains("flatten_at")) t.flatten_at = num(s, "/trace", "flatten_at");
  t.delta_star = num(s, "/trace", "delta_star", t.delta_star);
  if (t.delta == 0.0) throw ConfigError("/trace/delta", "delta must be non-zero");
  if (!(t.x_max > 0)) throw ConfigError("/trace/x_max", "x_max must be positive");
  return t;
}

BenchmarkConfig parse_benchmark(const json& root) {
  BenchmarkConfig b;
  if (root.contains("benchmark")) {
    const json& s = section(root, "benchmark");
    if (s.contains("transform")) {
      try {
        b.transform = series_kind_from_name(str(s, "/benchmark", "transform"));
      } catch (const Error& e) {
        throw ConfigError("/benchmark/transform", e.what());
      }
    }
    if (s.contains("grid")) {
      const json& g = s.at("grid");
      if (!g.is_array()) throw ConfigError("/benchmark/grid", "grid must be an array");
      for (size_t i = 0; i < g.size(); ++i) {
        const std::string w = "/benchmark/grid/" + std::to_string(i);
        BenchmarkPoint p;
        p.n = integer(g[i], w, "n");
        p.M = num(g[i], w, "M", 23.0);
        p.eps = num(g[i], w, "eps", 1e-15);
        if (p.n < 1) throw ConfigError(w + "/n", "n must be positive");
        b.grid.push_back(p);
      }
    }
  }
  if (b.grid.empty()) b.grid = {{1260, 23.0, 1e-15}, {3780, 23.0, 1e-15}, {7560, 23.0, 1e-15}};
  return b;
}

}  // namespace sinhz::tools
