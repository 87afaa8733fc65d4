// JSON-lines and human renderings of suite reports.

#include "sheaflogic/report.hpp"

#include <cstdio>

namespace sheaflogic {

const char* to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::pass: return "pass";
        case CheckStatus::fail: return "fail";
        case CheckStatus::resource_exceeded: return "resource-exceeded";
    }
    return "?";
}

bool SuiteReport::all_pass() const {
    for (const auto& c : checks)
        if (c.status != CheckStatus::pass) return false;
    return true;
}

bool SuiteReport::any_exceeded() const {
    for (const auto& c : checks)
        if (c.status == CheckStatus::resource_exceeded) return true;
    return false;
}

int SuiteReport::exit_code() const {
    for (const auto& c : checks)
        if (c.status == CheckStatus::fail) return 1;
    return any_exceeded() ? 3 : 0;
}

std::string report_lines(const SuiteReport& r, bool with_timings) {
    std::string out;
    nlohmann::json header{{"suite", r.suite}, {"config", r.config}};
    out += header.dump();
    out += '\n';
    long long failed = 0, exceeded = 0;
    for (const auto& c : r.checks) {
        nlohmann::json line{{"check", c.name}, {"status", to_string(c.status)},
                            {"cases", c.cases}};
        if (!c.detail.is_null()) line["detail"] = c.detail;
        if (with_timings) line["wall_ms"] = c.wall_ms;
        out += line.dump();
        out += '\n';
        failed += c.status == CheckStatus::fail;
        exceeded += c.status == CheckStatus::resource_exceeded;
    }
    const char* status = failed ? "fail" : (exceeded ? "resource-exceeded" : "pass");
    nlohmann::json summary{{"summary",
                            {{"checks", r.checks.size()},
                             {"failed", failed},
                             {"resource_exceeded", exceeded},
                             {"status", status}}}};
    out += summary.dump();
    out += '\n';
    return out;
}

std::string report_text(const SuiteReport& r) {
    std::string out;
    long long failed = 0, exceeded = 0;
    double total_ms = 0.0;
    for (const auto& c : r.checks) {
        total_ms += c.wall_ms;
        if (c.status == CheckStatus::pass) continue;
        failed += c.status == CheckStatus::fail;
        exceeded += c.status == CheckStatus::resource_exceeded;
        out += "  [" + std::string(to_string(c.status)) + "] " + c.name;
        if (!c.detail.is_null()) out += "  " + c.detail.dump();
        out += '\n';
    }
    char line[160];
    std::snprintf(line, sizeof line, "suite %s: %zu checks, %lld failed, %lld exceeded — %s (%.0f ms)",
                  r.suite.c_str(), r.checks.size(), failed, exceeded,
                  failed ? "FAIL" : (exceeded ? "RESOURCE-EXCEEDED" : "PASS"), total_ms);
    out += line;
    out += '\n';
    return out;
}

} // namespace sheaflogic
