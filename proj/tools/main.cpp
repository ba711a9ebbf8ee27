#include <iostream>

#include "smld/cli.hpp"

int main(int argc, char** argv) { return smld::main_entry(argc, argv, std::cout, std::cerr); }
