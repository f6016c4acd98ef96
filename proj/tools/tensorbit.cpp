#include <iostream>

#include "tensorbit/cli.hpp"

int main(int argc, char** argv) { return tensorbit::run_cli(argc, argv, std::cout, std::cerr); }
