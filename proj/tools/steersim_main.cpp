#include <string>
#include <vector>

#include "steersim/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return steersim::cli::run(std::move(args));
}
