#include <iostream>

#include "twinmask/commands.hpp"

int main(int argc, char** argv) { return twinmask::cli::run(argc, argv, std::cout, std::cerr); }
