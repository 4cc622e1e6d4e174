#include <vector>
#include <string>

#include "fockcis/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return fockcis::run_cli(args);
}
