#include <iostream>

#include "zetarule/cli.hpp"

int main(int argc, char** argv) { return zetarule::cli::run(argc, argv, std::cout, std::cerr); }
