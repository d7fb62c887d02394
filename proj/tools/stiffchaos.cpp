#include <iostream>

#include "stiffchaos/cli/commands.hpp"

int main(int argc, char** argv) { return stiffchaos::cli::run_cli(argc, argv, std::cout, std::cerr); }
