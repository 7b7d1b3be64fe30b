#include <iostream>

#include "regrid/cli.hpp"

int main(int argc, char** argv) {
  return regrid::run_main(argc, argv, std::cout, std::cerr);
}
