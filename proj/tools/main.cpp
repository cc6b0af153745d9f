#include <iostream>

#include "jmetric/cli.hpp"

int main(int argc, char** argv) { return jmetric::cli::run(argc, argv, std::cout, std::cerr); }
