#include <iostream>

#include "fairspec/experiments.hpp"

int main(int argc, char** argv) { return fairspec::run_cli(argc, argv, std::cout, std::cerr); }
