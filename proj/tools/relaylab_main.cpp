#include "relaylab/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return relaylab::cli_main(argc, argv, std::cout, std::cerr);
}
