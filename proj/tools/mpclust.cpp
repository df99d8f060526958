#include <iostream>
#include <string>
#include <vector>

#include "mpclust/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return mpclust::cli::run(args, std::cout, std::cerr);
}
