#include <iostream>

#include "indef/cli.hpp"

int main(int argc, char** argv) { return indef::run_cli(argc, argv, std::cout, std::cerr); }
