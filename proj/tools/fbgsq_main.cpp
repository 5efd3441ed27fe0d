#include <iostream>

#include "fbg/cli.hpp"

int main(int argc, char** argv) { return fbg::run_command(argc, argv, std::cout, std::cerr); }
