#include <iostream>

#include "sinhz_tools/commands.hpp"

int main(int argc, char** argv) {
  return sinhz::tools::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
