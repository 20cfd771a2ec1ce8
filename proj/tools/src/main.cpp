#include "weylctl/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return weylctl::main_entry(argc, argv, std::cout, std::cerr); }
