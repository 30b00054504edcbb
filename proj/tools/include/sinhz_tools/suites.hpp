#pragma once

#include <string>
#include <vector>

#include "sinhz/oracles.hpp"

namespace sinhz::tools {

struct CheckResult {
  int criterion = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// One row of the complexity table. Measured counts are minimal node counts meeting eps
// (relative) in quad precision; predicted counts come from the closed-form estimates.
struct ComplexityRow {
  int n = 0;
  double M = 0.0;
  double eps = 0.0;
  int N_trap_predicted = 0;
  int N_trap_measured = 0;
  int N_sinh_predicted = 0;
  int N_sinh_measured = 0;
  double K_predicted = 0.0;
  double K_measured = 0.0;
  double err_trap = 0.0;  // relative error with the planned trapezoid
  double err_sinh = 0.0;  // relative error with the planned sinh contour
};

ComplexityRow complexity_row(SeriesKind kind, int n, double M, double eps);
SeriesKind series_kind_from_name(const std::string& name);  // throws PreconditionError
const char* complexity_csv_header();
std::string complexity_csv_line(const ComplexityRow& r);

// Acceptance criteria 1..10.
CheckResult run_criterion(int id, int threads);

// Named verification suites; "all" runs every criterion. Throws PreconditionError for unknown names.
const std::vector<std::string>& suite_names();
std::vector<CheckResult> run_suite(const std::string& name, int threads);

}  // namespace sinhz::tools
