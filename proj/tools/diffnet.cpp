#include <iostream>

#include "diffnet_cli.hpp"

int main(int argc, char** argv)
{
    return diffnet::cli::main_entry(argc, argv, std::cout, std::cerr);
}
