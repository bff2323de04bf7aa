// One line per acceptance criterion; exit status 0 iff all pass.
// Usage: acceptance [criterion ids...]

#include <cstdlib>
#include <iostream>
#include <set>

#include "khcob/suites.hpp"

using namespace khcob;

int main(int argc, char** argv) {
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    auto keys = suite_keys();
    int failed = 0;
    for (int id = 1; id <= (int)keys.size(); ++id) {
        if (!only.empty() && !only.count(id)) continue;
        SuiteResult r = run_suite(keys[id - 1]);
        std::cout << r.line() << std::endl;
        failed += !r.pass;
    }
    std::cout << (failed ? "FAILED " + std::to_string(failed) + " criteria" : "all criteria passed") << std::endl;
    return failed ? 1 : 0;
}
