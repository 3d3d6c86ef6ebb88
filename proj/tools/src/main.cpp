#include <iostream>

#include "strata_cli/cli.hpp"

int main(int argc, char** argv) { return strata::cli::cli_main(argc, argv, std::cout, std::cerr); }
