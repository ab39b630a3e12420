#include <iostream>

#include "starsim/cli.hpp"

int main(int argc, char** argv) { return starsim::run_cli(argc, argv, std::cout, std::cerr); }
