#include <iostream>
#include <string>
#include <vector>

#include "svsp/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return svsp::run_cli(args, std::cin, std::cout, std::cerr);
}
