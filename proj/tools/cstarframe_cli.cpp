#include <iostream>

#include "cstarframe/cli.hpp"

int main(int argc, char** argv) { return csf::run_cli(argc, argv, std::cout, std::cerr); }
