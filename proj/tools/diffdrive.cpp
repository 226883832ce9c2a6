#include <iostream>

#include "diffdrive/cli.hpp"

int main(int argc, char** argv) {
  return diffdrive::cli::run(argc, argv, std::cout, std::cerr);
}
