#include <iostream>

#include "lieplan/cli.hpp"

int main(int argc, char** argv) { return lieplan::cli::run(argc, argv, std::cout, std::cerr); }
