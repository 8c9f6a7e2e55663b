#include <iostream>

#include "mixts/cli.hpp"

int main(int argc, char** argv) { return mixts::run_cli(argc, argv, std::cout, std::cerr); }
