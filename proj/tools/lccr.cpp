#include "lccr/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return lccr::cli::run(std::move(args), std::cout, std::cerr);
}
