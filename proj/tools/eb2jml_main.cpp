#include <iostream>
#include <string>
#include <vector>

#include "eb2jml/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return eb2jml::cli::run(args, std::cout, std::cerr);
}
