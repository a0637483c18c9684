#include "seqml/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return seqml::cli::run(argc, argv, std::cout, std::cerr); }
