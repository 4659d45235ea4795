#include <iostream>

#include "groupcast/cli.hpp"

int main(int argc, char** argv) { return groupcast::run_cli(argc, argv, std::cout, std::cerr); }
