#include <iostream>
#include <string>
#include <vector>

#include "oscint/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return oscint::run(args, std::cout, std::cerr);
}
