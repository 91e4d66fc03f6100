#include <iostream>

#include "shiproll/cli.hpp"

int main(int argc, char** argv) { return shiproll::run_cli(argc, argv, std::cout, std::cerr); }
