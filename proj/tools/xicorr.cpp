#include <iostream>

#include "xicorr/cli.hpp"

int main(int argc, char** argv) { return xicorr::cli::run(argc, argv, std::cout, std::cerr); }
