#include <iostream>

#include "actlex/cli.hpp"

int main(int argc, char** argv) {
    std::ios::sync_with_stdio(false);
    return actlex::cli_dispatch({argv + 1, argv + argc}, std::cout, std::cerr);
}
