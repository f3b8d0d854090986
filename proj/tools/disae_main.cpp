#include "disae/cli/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return disae::cli::run_cli(argc, argv, std::cout, std::cerr); }
