#include <iostream>

#include "afm/cli.hpp"

int main(int argc, char** argv) { return afm::cli::main(argc, argv, std::cout, std::cerr); }
