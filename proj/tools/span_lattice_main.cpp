#include <iostream>
#include <string>
#include <vector>

#include "span_lattice/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return span_lattice::cli::run_command(std::move(args), std::cout, std::cerr);
}
