#include <iostream>
#include <string>
#include <vector>

#include "adiabatic/cli/cli.hpp"

int main(int argc, char** argv) {
  return adiabatic::cli::run_cli(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
