#include <iostream>

#include "eecdma/cli.hpp"

int main(int argc, char** argv) {
    return eecdma::run_cli(argc, argv, std::cout, std::cerr);
}
