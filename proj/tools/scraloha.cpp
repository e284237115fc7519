#include <iostream>

#include "scraloha/cli.hpp"

int main(int argc, char** argv) { return scraloha::cli::run(argc, argv, std::cout, std::cerr); }
