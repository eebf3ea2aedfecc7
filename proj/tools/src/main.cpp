#include <iostream>

#include "vfsk/cli/app.hpp"

int main(int argc, char** argv) { return vfsk::cli::main_entry(argc, argv, std::cout, std::cerr); }
