#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dormantwalk::acceptance {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Runs every acceptance criterion at its pinned parameters and tolerances.
/// Deterministic for a fixed seed.
std::vector<CriterionResult> run_all(std::uint64_t seed = 0x5eedu);

/// Prints one pass/fail line per criterion to stdout; returns the number of
/// failures.
int run_and_report(std::uint64_t seed = 0x5eedu);

}  // namespace dormantwalk::acceptance
