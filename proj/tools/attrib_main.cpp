#include <iostream>

#include "attrib/cli/commands.hpp"

int main(int argc, char** argv) {
  return attrib::cli::run(argc, argv, std::cout, std::cerr);
}
