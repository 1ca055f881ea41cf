#include "qproc/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return qproc::run_cli(argc, argv, std::cout, std::cerr); }
