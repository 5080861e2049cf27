#include <iostream>
#include <string>
#include <vector>

#include "spca/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return spca::run_cli(args, std::cout, std::cerr);
}
