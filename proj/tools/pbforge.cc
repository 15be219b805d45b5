#include <pbforge/cli.hh>

#include <iostream>

auto main(int argc, char * argv[]) -> int
{
    return pbforge::run_cli(argc, argv, std::cout, std::cerr);
}
