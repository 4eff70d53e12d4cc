#include <iostream>

#include "sclab/lab/cli.hpp"

int main(int argc, char** argv) { return sclab::lab::cli_main(argc, argv, std::cout, std::cerr); }
