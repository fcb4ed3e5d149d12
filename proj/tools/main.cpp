#include <iostream>

#include "navierlab/cli.hpp"

int main(int argc, char** argv) {
  return navierlab::cli::run(argc, argv, std::cout, std::cerr);
}
