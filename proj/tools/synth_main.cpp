#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return translim::cli::run_synth(argc, argv, std::cout, std::cerr); }
