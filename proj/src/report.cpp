#include "deltasum/report.hpp"

namespace deltasum {

namespace {

std::string csv_escape(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::string number(double x) { return Json(x).dump(); }

}  // namespace

Json ScanReport::to_json(bool include_timing) const {
    Json j;
    j["suite"] = suite;
    j["grid"] = grid;
    j["cases"] = cases;
    j["skipped"] = skipped;
    j["max_deviation"] = max_deviation;
    j["tolerance"] = tolerance;
    j["worst_witness"] = worst_witness;
    j["passed"] = passed;
    if (include_timing) j["runtime_ms"] = runtime_ms;
    if (!metrics.empty()) j["metrics"] = metrics;
    return j;
}

std::string ScanReport::dump(bool include_timing) const { return to_json(include_timing).dump(); }

std::string ScanReport::csv_header() {
    return "suite,cases,skipped,max_deviation,tolerance,passed,runtime_ms,worst_witness,grid";
}

std::string ScanReport::csv_row() const {
    return csv_escape(suite) + "," + std::to_string(cases) + "," + std::to_string(skipped) + "," +
           number(max_deviation) + "," + number(tolerance) + "," + (passed ? "true" : "false") + "," +
           std::to_string(runtime_ms) + "," + csv_escape(worst_witness.dump()) + "," + csv_escape(grid.dump());
}

ScanReport report_from_json(const Json& j) {
    ScanReport r;
    r.suite = j.at("suite").get<std::string>();
    r.grid = j.at("grid");
    r.cases = j.at("cases").get<std::int64_t>();
    r.skipped = j.value("skipped", std::int64_t{0});
    r.max_deviation = j.at("max_deviation").get<double>();
    r.tolerance = j.value("tolerance", 1.0);
    r.worst_witness = j.at("worst_witness");
    r.passed = j.at("passed").get<bool>();
    r.runtime_ms = j.value("runtime_ms", std::int64_t{0});
    if (j.contains("metrics")) r.metrics = j.at("metrics");
    return r;
}

}  // namespace deltasum
