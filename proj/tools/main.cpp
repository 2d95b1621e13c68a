#include <iostream>

#include "hodlr/cli.hpp"

int main(int argc, char** argv) {
  return hodlr::cli::run(argc, argv, std::cout, std::cerr);
}
