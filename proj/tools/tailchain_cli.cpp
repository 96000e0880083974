#include <iostream>
#include <string>
#include <vector>

#include "tailchain/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return tailchain::run_cli(args, std::cout, std::cerr);
}
