#include <cstdlib>
#include <iostream>

#include "suite.hpp"

int main(int argc, char** argv) {
    hopnet::selftest::SuiteOptions opts;
    if (argc > 1) opts.seed = std::strtoull(argv[1], nullptr, 10);
    const auto result = hopnet::selftest::run_suite(opts);
    hopnet::selftest::print_table(std::cout, result);
    return result.passed() ? 0 : 1;
}
