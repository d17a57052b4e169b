#include <iostream>

#include "cli/commands.hpp"

int main(int argc, char** argv) {
  ictal::cli::tune_allocator();
  return ictal::cli::run(argc, argv, std::cout, std::cerr);
}
