#include <string>
#include <vector>

#include "bsretract/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return bsretract::cli::run(args);
}
