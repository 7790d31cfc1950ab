#include <iostream>

#include "netequil/cli.hpp"

int main(int argc, char** argv) { return netequil::run_cli(argc, argv, std::cout, std::cerr); }
