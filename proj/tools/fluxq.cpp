#include <iostream>
#include <string>
#include <vector>

#include "fluxq/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return fluxq::cli::main(args, std::cout, std::cerr);
}
