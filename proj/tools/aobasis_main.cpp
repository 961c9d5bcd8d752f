#include <string>
#include <vector>

#include "aobasis/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return aobasis::cli::run_cli(args);
}
