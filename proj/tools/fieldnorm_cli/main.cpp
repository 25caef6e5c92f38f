#include <iostream>

#include "fieldnorm_cli/commands.hpp"

int main(int argc, char** argv) { return fieldnorm::cli::run(argc, argv, std::cout, std::cerr); }
