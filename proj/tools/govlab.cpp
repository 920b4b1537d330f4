#include <iostream>

#include "govlab/cli/commands.hpp"

int main(int argc, char **argv) {
  return govlab::cli::main(argc, argv,
                           {std::cout, std::cerr, govlab::cli::color_enabled()});
}
