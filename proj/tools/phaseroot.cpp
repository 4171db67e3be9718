#include <iostream>

#include "phaseroot/cli.hpp"

int main(int argc, char** argv) { return phaseroot::cli::run_cli(argc, argv, std::cout, std::cerr); }
