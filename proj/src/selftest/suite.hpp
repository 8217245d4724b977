#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "hopnet/io.hpp"

namespace hopnet::selftest {

using io::Json;

struct CriterionResult {
    int id = 0;
    std::string title;
    bool passed = false;
    std::string detail;  // one line, shown in the table
    Json metrics = Json::object();
    double seconds = 0.0;  // not part of any artifact
};

struct SuiteOptions {
    std::uint64_t seed = 20241014;
    std::size_t workers = 1;
    // Re-run everything with a different worker count and compare the
    // serialized artifacts byte for byte.
    bool determinism_check = true;
};

struct SuiteResult {
    std::vector<CriterionResult> criteria;  // ordered by id
    // File name -> content; identical for identical seeds.
    std::map<std::string, std::string> artifacts;

    bool passed() const;
};

SuiteResult run_suite(const SuiteOptions& opts);

// One line per criterion, then a summary line.
void print_table(std::ostream& os, const SuiteResult& result);

}  // namespace hopnet::selftest
