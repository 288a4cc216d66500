#include <iostream>

#include "vlprobe/cli/cli.hpp"

int main(int argc, char** argv) { return vlprobe::run_cli(argc, argv, std::cout, std::cerr); }
