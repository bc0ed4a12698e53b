#include <iostream>

#include "trustmarket/cli.hpp"

int main(int argc, char** argv) { return trustmarket::run_cli(argc, argv, std::cout, std::cerr); }
