#include <iostream>

#include "feller/cli.hpp"

int main(int argc, char** argv) {
  return feller::run_cli(argc, argv, std::cout, std::cerr);
}
