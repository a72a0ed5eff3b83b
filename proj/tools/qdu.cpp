#include <iostream>

#include "qdu/commands.hpp"

int main(int argc, char** argv) { return qdu::run_cli(argc, argv, std::cout, std::cerr); }
