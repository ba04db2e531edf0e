#include <iostream>
#include <string>
#include <vector>

#include "robust_nv/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return robust_nv::cli::run_command(args, std::cout, std::cerr);
}
