#include <iostream>

#include "tourmlm/cli.hpp"

int main(int argc, char** argv) { return tourmlm::run_cli(argc, argv, std::cout, std::cerr); }
