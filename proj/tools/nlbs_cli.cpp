// SPDX-License-Identifier: MIT
#include "nlbs/commands.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return nlbs::run_cli(argc, argv, std::cout, std::cerr);
}
