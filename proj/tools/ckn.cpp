#include <iostream>

#include "ckn/cli.hpp"

int main(int argc, char** argv)
{
    return ckn::cli::main_entry(argc, argv, std::cout, std::cerr);
}
