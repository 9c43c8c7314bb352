#include "flowkl/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return flowkl::cli::run_cli(argc, argv, std::cout, std::cerr); }
