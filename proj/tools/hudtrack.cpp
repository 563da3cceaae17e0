#include <iostream>

#include "hudtrack/cli.hpp"

int main(int argc, char** argv) { return hudtrack::cli::run(argc, argv, std::cout, std::cerr); }
