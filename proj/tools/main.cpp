#include <iostream>

#include "volsos/cli.hpp"

int main(int argc, char** argv) { return volsos::cli::run(argc, argv, std::cout, std::cerr); }
