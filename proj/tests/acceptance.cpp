// Runs acceptance criteria 1..10 and prints one verdict line each.
// Exit status is the number of failed criteria.
#include <cstdio>
#include <string>
#include <thread>

#include "sinhz_tools/suites.hpp"

int main(int argc, char** argv) {
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (argc > 1) threads = std::max(1, std::stoi(argv[1]));
  int failed = 0;
  for (int id = 1; id <= 10; ++id) {
    const sinhz::tools::CheckResult r = sinhz::tools::run_criterion(id, threads);
    std::printf("%s criterion %d %s: %s (%.2f s)\n", r.pass ? "PASS" : "FAIL", id, r.name.c_str(), r.detail.c_str(),
                r.seconds);
    std::fflush(stdout);
    failed += r.pass ? 0 : 1;
  }
  std::printf("%d of 10 criteria passed\n", 10 - failed);
  return failed;
}
