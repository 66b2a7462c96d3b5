#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return decaycoh::cli::run(argc, argv, std::cout, std::cerr); }
