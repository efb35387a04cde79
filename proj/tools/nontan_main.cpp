#include <iostream>
#include <string>
#include <vector>

#include "nontan/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return nontan::run(args, std::cout, std::cerr);
}
