#include <iostream>

#include "sudler/cli.hpp"

int main(int argc, char** argv) { return sudler::run_cli(argc, argv, std::cout, std::cerr); }
