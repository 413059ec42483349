#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <unistd.h>

#include "cattab/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    const bool styled = std::getenv("CATTAB_NO_COLOR") == nullptr && isatty(STDOUT_FILENO);
    const auto result = cattab::cli::run(args, styled);
    std::cout << result.out;
    std::cerr << result.err;
    return result.exit_code;
}
