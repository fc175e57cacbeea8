#include <iostream>

#include "gatwo/cli.hpp"

int main(int argc, char** argv) { return gatwo::cli::run(argc, argv, std::cout, std::cerr); }
