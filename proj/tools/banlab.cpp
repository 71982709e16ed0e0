#include "banlab_cli.hpp"

int main(int argc, char** argv) {
    return banlab::cli::run(argc, argv, std::cout, std::cerr);
}
