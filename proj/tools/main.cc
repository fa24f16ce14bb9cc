#include <iostream>
#include <string>
#include <vector>

#include "legalattr/cli.h"

int main(int argc, char **argv) {
  std::vector<std::string> args(argv, argv + argc);
  return legalattr::cli::Run(args, std::cout, std::cerr);
}
