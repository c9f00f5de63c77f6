#include "phtree/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return phtree::run_cli(argc, argv, std::cout, std::cerr); }
