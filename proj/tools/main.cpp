#include <iostream>
#include <string>
#include <vector>

#include "fastmobius/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return fastmobius::cli::run(args, std::cout, std::cerr);
}
