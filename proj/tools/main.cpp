#include <iostream>

#include "mpir/cli.hpp"

int main(int argc, char** argv) { return mpir::cli::run(argc, argv, std::cout, std::cerr); }
