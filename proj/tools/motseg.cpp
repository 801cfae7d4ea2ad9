#include <iostream>

#include "motseg/cli.hpp"

int main(int argc, char** argv) { return motseg::run_cli(argc, argv, std::cout, std::cerr); }
