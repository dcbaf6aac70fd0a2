#include <iostream>

#include "stickygraph/cli.hpp"

int main(int argc, char **argv) {
    return sticky::cli::main(argc, argv, std::cout, std::cerr);
}
