#include "rlab/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return rlab::cli_main(argc, argv, std::cout, std::cerr); }
