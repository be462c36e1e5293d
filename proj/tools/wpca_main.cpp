#include <iostream>

#include "wpca/cli/commands.hpp"

int main(int argc, char** argv) {
  return wpca::cli::run(argc, argv, std::cout, std::cerr);
}
