#pragma once

#include "deltasum/report.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace deltasum {

/// Grid generator shared by every randomized suite.
///
/// State update is the 64-bit MMIX recurrence
///   x <- 6364136223846793005 x + 1442695040888963407  (mod 2^64),
/// seeded with x = seed. An integer in [lo, hi] is lo + (x >> 32) mod (hi - lo + 1),
/// taken from the state after the update.
class GridRng {
public:
    explicit GridRng(std::uint64_t seed) : engine_(seed) {}
    std::uint64_t next() { return engine_(); }
    std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
        const auto span = std::uint64_t(hi - lo) + 1;
        return lo + std::int64_t((next() >> 32) % span);
    }

private:
    std::linear_congruential_engine<std::uint64_t, 6364136223846793005ULL, 1442695040888963407ULL, 0> engine_;
};

struct SuiteOptions {
    std::string preset = "default";  // "default" or "smoke"
    std::uint64_t seed = 1;
    std::int64_t trials = 0;  // reciprocity trial count; 0 keeps the preset
    std::int64_t budget = 0;  // cap on the number of cases; 0 means none
    unsigned workers = 1;
    double tolerance_scale = 1.0;
};

struct CaseResult {
    bool skipped = false;
    double deviation = 0.0;
    Json observed = Json::object();  // per-case quantities folded into metrics
};

const std::vector<std::string>& suite_names();
bool is_suite(const std::string& name);

// Runs a suite; the report's tolerance is the suite's own tolerance times
// tolerance_scale. Throws OutOfRange for unknown names or presets.
ScanReport run_suite(const std::string& name, const SuiteOptions& opt = {});

// Re-evaluates one case of a suite from its parameter tuple.
CaseResult rerun_case(const std::string& name, const Json& witness);

}  // namespace deltasum
