#pragma once

// Machine-readable run reports. A suite produces one CheckResult per named
// check; the report serializes as JSON lines (a config header, one line per
// check, a summary line). Reports are byte-identical across runs for a
// fixed configuration and seed; wall times are kept out of the serialized
// form unless explicitly requested, since they are the one nondeterministic
// field.

#include <string>
#include <vector>

#include <json.hpp>

namespace sheaflogic {

enum class CheckStatus { pass, fail, resource_exceeded };

const char* to_string(CheckStatus s);

struct CheckResult {
    std::string name;
    CheckStatus status = CheckStatus::pass;
    long long cases = 0;   // instances / teams / items examined
    nlohmann::json detail; // witness payload (countermodel, divergence, ...)
    double wall_ms = 0.0;  // diagnostics only
};

struct SuiteReport {
    std::string suite;
    nlohmann::json config; // resolved configuration, including the seed
    std::vector<CheckResult> checks;

    bool all_pass() const;
    bool any_exceeded() const;
    // 0 all pass; 1 any check failed; 3 no failure but a check ran out of
    // resources. (2 is reserved for input errors, raised before a report
    // exists.)
    int exit_code() const;
};

// JSON-lines serialization as described above.
std::string report_lines(const SuiteReport& r, bool with_timings = false);

// Short human-readable rendering, one line per check plus a summary.
std::string report_text(const SuiteReport& r);

} // namespace sheaflogic
