#include <iostream>
#include <string>
#include <vector>

#include "mmrec/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return mmrec::run(args, std::cout, std::cerr);
}
