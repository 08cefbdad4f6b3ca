#include "ppens/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return ppens::cli::main_entry(argc, argv, std::cout, std::cerr); }
