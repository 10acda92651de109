#include <iostream>

#include "bacoord/cli/cli.hpp"

int main(int argc, char** argv) { return bacoord::cli::run(argc, argv, std::cout, std::cerr); }
