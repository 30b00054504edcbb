#include "sinhz_tools/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "sinhz/errors.hpp"
#include "sinhz/levelcurves.hpp"
#include "sinhz/pricing.hpp"
#include "sinhz_tools/config.hpp"
#include "sinhz_tools/suites.hpp"

namespace sinhz::tools {

namespace {

using nlohmann::json;

std::string fmt17(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quoted(const std::string& s) { return json(s).dump(); }

void diagnose(std::ostream& err, const char* kind, const std::string& field, const std::string& message) {
  json d = {{"error", kind}, {"message", message}};
  if (!field.empty()) d["field"] = field;
  err << d.dump() << '\n';
}

// Maps library and config exceptions onto the documented exit codes.
template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    diagnose(err, "config", e.field(), e.what());
    return exit_config;
  } catch (const PreconditionError& e) {
    diagnose(err, "config", "", e.what());
    return exit_config;
  } catch (const Error& e) {
    diagnose(err, "numerical", "", e.what());
    return exit_numerical;
  } catch (const std::exception& e) {
    diagnose(err, "numerical", "", e.what());
    return exit_numerical;
  }
}

int default_threads() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

}  // namespace

int cmd_price(const CommandOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const json root = load_config(o.config);
    PricingRequest req = parse_price_request(root);
    if (o.threads) req.threads = *o.threads;
    if (o.eps) req.eps = *o.eps;
    const auto t0 = std::chrono::steady_clock::now();
    const PricingResult r = price(req);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!std::isfinite(r.price)) throw ConvergenceError("price is not finite");
    out << "{\"price\": " << fmt17(r.price) << ", \"achieved_error_estimate\": " << fmt17(r.error_estimate)
        << ", \"q_nodes_used\": " << r.z_nodes << ", \"inner_nodes_avg\": " << fmt17(r.xi_nodes)
        << ", \"wall_time\": " << fmt17(wall) << ", \"method\": " << quoted(r.method) << "}\n";
    return int(exit_ok);
  });
}

int cmd_benchmark(const CommandOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const json root = o.config.empty() ? json::object() : load_config(o.config);
    const BenchmarkConfig b = parse_benchmark(root);
    out << complexity_csv_header() << '\n';
    for (const BenchmarkPoint& p : b.grid) {
      out << complexity_csv_line(complexity_row(b.transform, p.n, p.M, o.eps.value_or(p.eps))) << '\n';
    }
    return int(exit_ok);
  });
}

int cmd_trace(const CommandOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const json root = load_config(o.config);
    if (!root.contains("model")) throw ConfigError("/model", "missing section 'model'");
    const LevyModel m = parse_model(root.at("model"));
    const TraceConfig t = parse_trace(root);
    double u = 0.0;
    if (t.u) {
      u = *t.u;
    } else if (auto b = m.symmetrizing_beta()) {
      u = -*b;
    } else if (std::isfinite(m.strip_minus()) && std::isfinite(m.strip_plus())) {
      u = 0.5 * (m.strip_minus() + m.strip_plus());
    }
    ExtendedCurve c = build_extended_curve(m, t.delta, u, t.x_max);
    if (t.flatten_at) c = flatten_curve(m, c, *t.flatten_at, t.delta_star);
    write_curve_csv(out, m, c);
    return int(exit_ok);
  });
}

int cmd_verify(const CommandOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const std::vector<CheckResult> results = run_suite(o.suite, o.threads.value_or(default_threads()));
    bool all = true;
    for (const CheckResult& r : results) {
      all = all && r.pass;
      out << (r.pass ? "PASS" : "FAIL") << " criterion " << r.criterion << " " << r.name << ": " << r.detail
          << " (" << fmt17(r.seconds) << " s)\n";
    }
    out << (all ? "suite passed" : "suite failed") << '\n';
    return int(exit_ok);
  });
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sinh-accelerated Z-transform pricer for discretely monitored options"};
  app.require_subcommand(1);
  CommandOptions o;
  std::string out_path;
  int threads = 0;
  double eps = 0.0;
  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", o.config, "JSON config path");
    if (needs_config) c->required();
    sub->add_option("--out", out_path, "write output to this file instead of stdout");
    sub->add_option("--threads", threads, "bound on engine parallelism")->check(CLI::PositiveNumber);
    sub->add_option("--eps", eps, "error tolerance override")->check(CLI::Range(0.0, 1.0));
  };
  CLI::App* price_cmd = app.add_subcommand("price", "price one option (JSON record)");
  CLI::App* bench_cmd = app.add_subcommand("benchmark", "trapezoid vs sinh complexity table (CSV)");
  CLI::App* trace_cmd = app.add_subcommand("trace", "dump a level curve (CSV)");
  CLI::App* verify_cmd = app.add_subcommand("verify", "run a verification suite");
  add_common(price_cmd, true);
  add_common(bench_cmd, false);
  add_common(trace_cmd, true);
  add_common(verify_cmd, false);
  verify_cmd->add_option("suite", o.suite, "suite name")->required();

  // CLI11 consumes arguments from the back and excludes the program name.
  std::vector<std::string> rest(args.rbegin(), args.rend());
  if (!rest.empty()) rest.pop_back();
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    diagnose(err, "config", "", e.what());
    return exit_config;
  }
  if (threads > 0) o.threads = threads;
  if (eps > 0.0) o.eps = eps;

  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) {
      diagnose(err, "config", "--out", "cannot open output file '" + out_path + "'");
      return exit_config;
    }
  }
  std::ostream& sink = out_path.empty() ? out : file;
  if (price_cmd->parsed()) return cmd_price(o, sink, err);
  if (bench_cmd->parsed()) return cmd_benchmark(o, sink, err);
  if (trace_cmd->parsed()) return cmd_trace(o, sink, err);
  return cmd_verify(o, sink, err);
}

}  // namespace sinhz::tools
