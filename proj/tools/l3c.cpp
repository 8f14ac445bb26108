#include "l3c/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return l3c::cli::run_cli(std::move(args), std::cout, std::cerr);
}
