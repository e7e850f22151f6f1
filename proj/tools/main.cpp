#include <iostream>

#include "flatgp/cli.hpp"

int main(int argc, char** argv) { return flatgp::cli::run(argc, argv, std::cout, std::cerr); }
