#include <iostream>

#include "mixedpde/cli.hpp"

int main(int argc, char** argv) { return mixedpde::run_cli(argc, argv, std::cout, std::cerr); }
