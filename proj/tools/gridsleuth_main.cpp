#include <iostream>
#include <string>
#include <vector>

#include "gridsleuth/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return gridsleuth::run_cli(args, std::cout, std::cerr);
}
