#include <iostream>

#include "pwc/cli.hpp"

int main(int argc, char** argv) { return pwc::main_entry(argc, argv, std::cout, std::cerr); }
