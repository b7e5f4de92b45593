#include "vanetqos/harness/cli.hpp"

int main(int argc, char** argv) {
    return vanetqos::cli_main(std::vector<std::string>(argv + 1, argv + argc));
}
