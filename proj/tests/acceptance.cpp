// Acceptance gate: runs every suite and prints one pass/fail line per
// criterion. Exit status is nonzero if any criterion fails.

#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "nct/suites.hpp"

int main(int argc, char** argv) {
    std::uint64_t seed = 20260809;
    if (argc > 1) seed = std::strtoull(argv[1], nullptr, 10);

    bool all_ok = true;
    int index = 0;
    for (const auto& name : nct::suites::suite_names()) {
        nct::suites::SuiteResult r = nct::suites::run_suite(name, seed);
        ++index;
        std::printf("[%s] %2d %-20s %s (%.2fs", r.passed ? "PASS" : "FAIL", index,
                    r.name.c_str(), r.detail.c_str(), r.seconds);
        if (r.limit_seconds > 0) std::printf(" / %.0fs budget", r.limit_seconds);
        std::printf(")\n");
        std::fflush(stdout);
        all_ok = all_ok && r.passed;
    }
    std::printf("%s\n", all_ok ? "acceptance: all criteria passed"
                              : "acceptance: some criteria FAILED");
    return all_ok ? 0 : 1;
}
