#include "qrecur/commands.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return qrecur::run_cli(argc, argv, std::cout, std::cerr);
}
