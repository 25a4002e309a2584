#include <iostream>

#include "dipolefield_cli/cli.hpp"

int main(int argc, char** argv) { return dipolefield::cli::run(argc, argv, std::cout, std::cerr); }
