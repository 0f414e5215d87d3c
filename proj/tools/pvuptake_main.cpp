#include <string>
#include <vector>

#include "pvuptake/cli.hpp"

int main(int argc, char** argv) {
    return pvuptake::cli::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
