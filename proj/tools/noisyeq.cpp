#include <iostream>

#include "noisyeq/cli.hpp"

int main(int argc, char** argv) { return noisyeq::cli::main_entry(argc, argv, std::cout, std::cerr); }
