#ifndef NCT_SUITES_HPP
#define NCT_SUITES_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace nct::suites {

/// One acceptance suite outcome. `passed` covers both the statistical
/// threshold and the runtime budget when the suite has one.
struct SuiteResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
    double limit_seconds = 0.0; // 0 = no budget
};

std::vector<std::string> suite_names();

SuiteResult run_suite(const std::string& name, std::uint64_t seed = 20260809);

std::vector<SuiteResult> run_all(std::uint64_t seed = 20260809);

} // namespace nct::suites

#endif
