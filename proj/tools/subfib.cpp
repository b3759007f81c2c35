#include <iostream>

#include "subfib/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return subfib::run_cli(args, std::cout, std::cerr);
}
