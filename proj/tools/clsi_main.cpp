#include <iostream>
#include <string>
#include <vector>

#include "clsi/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return clsi::run_cli(args, std::cout, std::cerr);
}
