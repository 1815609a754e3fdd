#include <iostream>

#include "cnsdist/cli.hpp"

int main(int argc, char** argv) { return cnsdist::cli::run(argc, argv, std::cout, std::cerr); }
