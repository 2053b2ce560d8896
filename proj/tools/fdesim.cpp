#include <iostream>

#include "fdesim/cli.hpp"

int main(int argc, char** argv) { return fdesim::run_cli(argc, argv, std::cout, std::cerr); }
