#include <iostream>
#include <string>
#include <vector>

#include "mixgap/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  return mixgap::cli::run(args, std::cout, std::cerr);
}
