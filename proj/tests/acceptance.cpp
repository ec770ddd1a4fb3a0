// One PASS/FAIL line per acceptance criterion; nonzero exit if any fails.

#include "deltasum/verify.hpp"

#include <chrono>
#include <cstdio>
#include <map>
#include <string>

using namespace deltasum;

namespace {

constexpr double kExponentSeconds = 1.0;
constexpr double kPsiSeconds = 30.0;
constexpr double kC3Seconds = 60.0;
constexpr double kWeilSeconds = 300.0;
constexpr double kRecurrenceResidual = 1e-9;
constexpr double kC4Ceiling = 10.0;

struct Timed {
    ScanReport report;
    double seconds;
};

std::map<std::string, Timed> runs;

const Timed& run(const std::string& name) {
    auto it = runs.find(name);
    if (it != runs.end()) return it->second;
    const auto start = std::chrono::steady_clock::now();
    ScanReport r = run_suite(name);
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return runs.emplace(name, Timed{std::move(r), s}).first->second;
}

int failures = 0;

void line(int n, bool ok, const std::string& what, const std::string& detail) {
    std::printf("criterion %d: %s %s (%s)\n", n, ok ? "PASS" : "FAIL", what.c_str(), detail.c_str());
    std::fflush(stdout);
    failures += !ok;
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

double strict(const ScanReport& r) { return r.metrics.value("max_strict_deviation", 1e300); }

template <class F>
void guarded(int n, const std::string& what, F&& f) {
    try {
        f();
    } catch (const std::exception& e) {
        line(n, false, what, std::string("error: ") + e.what());
    }
}

}  // namespace

int main() {
    guarded(1, "exponent", [] {
        const Timed& t = run("exponent");
        const Json& m = t.report.metrics;
        const bool exact = m.value("theta", "") == "1/154" && m.value("exponent", "") == "115/154";
        const bool staged = m["staged"]["result"] == m["lp"];
        const bool ok = t.report.passed && exact && staged && t.seconds < kExponentSeconds;
        line(1, ok, "exponent",
             "theta " + m.value("theta", "?") + ", exponent " + m.value("exponent", "?") + ", staged equals LP " +
                 (staged ? "yes" : "no") + fmt(", %.3f s", t.seconds));
    });
    guarded(2, "psi-average", [] {
        const Timed& t = run("psi-average");
        const bool ok = t.report.passed && strict(t.report) <= 1.0 && t.seconds < kPsiSeconds;
        line(2, ok, "psi-average",
             std::to_string(t.report.cases) + " cases" + fmt(", strict deviation %.3g", strict(t.report)) +
                 fmt(", %.1f s", t.seconds));
    });
    guarded(3, "c3", [] {
        const Timed& t = run("c3");
        const bool ok = t.report.passed && t.seconds < kC3Seconds;
        line(3, ok, "c3",
             std::to_string(t.report.cases) + " cases" + fmt(", max deviation %.3g", t.report.max_deviation) +
                 fmt(", max |c3|/M %.3g", t.report.metrics.value("observed_max_abs_over_M", 0.0)) +
                 fmt(", %.1f s", t.seconds));
    });
    guarded(4, "weil", [] {
        const Timed& t = run("weil");
        const bool ok = t.report.passed && t.seconds < kWeilSeconds;
        line(4, ok, "weil",
             std::to_string(t.report.cases) + " cases" + fmt(", max ratio %.17g", t.report.max_deviation) +
                 fmt(", %.1f s", t.seconds));
    });
    guarded(5, "voronoi-char", [] {
        // The raw sum is compared with the exact evaluation and with the phase
        // exactly as written; both must agree for the criterion.
        const Timed& t = run("voronoi-char");
        const Json& m = t.report.metrics;
        const long mism = m.value("stated_phase_mismatches", -1L), undef = m.value("stated_phase_undefined", -1L);
        const bool exact_ok = t.report.passed && strict(t.report) <= 1.0;
        const bool ok = exact_ok && mism == 0 && undef == 0;
        line(5, ok, "voronoi-char",
             std::to_string(t.report.cases) + fmt(" cases, exact form strict deviation %.3g", strict(t.report)) +
                 ", written phase: " + std::to_string(mism) + " mismatches of " +
                 std::to_string(m.value("stated_phase_cases", 0L)) + " defined, " + std::to_string(undef) +
                 " undefined");
    });
    guarded(6, "twisted-split", [] {
        const Timed& t = run("twisted-split");
        const bool ok = t.report.passed && strict(t.report) <= 1.0;
        line(6, ok, "twisted-split",
             std::to_string(t.report.cases) + fmt(" cases, strict deviation %.3g", strict(t.report)));
    });
    guarded(7, "bessel-decay", [] {
        const Timed& t = run("bessel-decay");
        const double res = t.report.metrics.value("max_recurrence_residual", 1e300);
        const bool ok = t.report.passed && res <= kRecurrenceResidual;
        line(7, ok, "bessel-decay",
             fmt("cutoff %.6g", t.report.metrics.value("cutoff", 0.0)) + fmt(", max deviation %.3g", t.report.max_deviation) +
                 fmt(", recurrence residual %.3g", res));
    });
    guarded(8, "c4", [] {
        const Timed& t = run("c4");
        const double ratio = t.report.metrics.value("observed_max_ratio", 1e300);
        const bool ok = t.report.passed && t.report.cases == 200 && ratio <= kC4Ceiling;
        line(8, ok, "c4", std::to_string(t.report.cases) + fmt(" instances, observed max ratio %.6g", ratio));
    });
    guarded(9, "dsum-cancel", [] {
        const Timed& t = run("dsum-cancel");
        line(9, t.report.passed, "dsum-cancel",
             std::to_string(t.report.cases) + fmt(" characters, max |D|/(4 sqrt M) %.6g", t.report.max_deviation));
    });
    guarded(10, "determinism", [] {
        std::string differ;
        for (const auto& name : suite_names()) {
            const std::string first = run(name).report.dump();
            if (run_suite(name).dump() != first) differ += " " + name;
        }
        line(10, differ.empty(), "determinism",
             differ.empty() ? std::to_string(suite_names().size()) + " suites byte-identical on rerun"
                            : "differing:" + differ);
    });
    return failures ? 1 : 0;
}
