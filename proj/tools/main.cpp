#include <iostream>

#include "corder/cli.hpp"

int main(int argc, char** argv) { return corder::cli_dispatch(argc, argv, std::cout, std::cerr); }
