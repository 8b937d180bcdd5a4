#include <iostream>
#include <string>
#include <vector>

#include "riccati_spectra/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return riccati_spectra::run_cli(args, std::cout, std::cerr);
}
