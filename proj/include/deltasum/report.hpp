#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>

namespace deltasum {

using Json = nlohmann::ordered_json;

/// Outcome of one verification campaign.
///
/// `max_deviation` is measured in the suite's own unit and `passed` is
/// exactly `max_deviation <= tolerance`. `worst_witness` holds the parameter
/// tuple that attained the maximum, so the case can be re-run in isolation.
struct ScanReport {
    std::string suite;
    Json grid = Json::object();
    std::int64_t cases = 0;
    std::int64_t skipped = 0;
    double max_deviation = 0.0;
    double tolerance = 1.0;
    Json worst_witness = Json::object();
    bool passed = false;
    std::int64_t runtime_ms = 0;
    Json metrics = Json::object();

    // runtime_ms is the only non-deterministic field; it is left out of the
    // document unless asked for.
    Json to_json(bool include_timing = false) const;
    std::string dump(bool include_timing = false) const;

    static std::string csv_header();
    std::string csv_row() const;
};

ScanReport report_from_json(const Json& j);

}  // namespace deltasum
