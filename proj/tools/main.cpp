#include "lapi/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return lapi::run_cli(argc, argv, std::cout, std::cerr);
}
