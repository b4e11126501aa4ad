#include <iostream>

#include "lipgd/harness/cli.hpp"

int main(int argc, char** argv) { return lipgd::harness::cli_main(argc, argv, std::cout, std::cerr); }
