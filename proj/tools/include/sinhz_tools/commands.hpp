#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace sinhz::tools {

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_numerical = 3 };

struct CommandOptions {
  std::string config;
  std::string suite;               // verify only
  std::optional<int> threads;      // overrides engine.threads
  std::optional<double> eps;       // overrides engine.eps and benchmark grid eps
};

// Each command writes its primary output to `out` and JSON diagnostics to `err`.
int cmd_price(const CommandOptions& o, std::ostream& out, std::ostream& err);
int cmd_benchmark(const CommandOptions& o, std::ostream& out, std::ostream& err);
int cmd_trace(const CommandOptions& o, std::ostream& out, std::ostream& err);
int cmd_verify(const CommandOptions& o, std::ostream& out, std::ostream& err);

// Full command line (args[0] is the program name). --out redirects `out` to a file.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sinhz::tools
