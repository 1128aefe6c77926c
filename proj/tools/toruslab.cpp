#include "toruslab/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return toruslab::cli_main(argc, argv, std::cout, std::cerr); }
