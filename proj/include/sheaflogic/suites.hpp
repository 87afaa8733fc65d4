#pragma once

// The verification suites behind the command-line workbench. Each suite is
// a pure function of its configuration and returns a deterministic report:
//
//   run_axioms       validity grids for every axiom schema, plus the
//                    negative control, in the selected model;
//   run_oracle_diff  seeded corpus evaluated by both routes (forcing oracle
//                    and team evaluator), plus bound-stability rechecks;
//   run_category     independent-pullback axioms on both sites, the
//                    map-to-Set-pullbacks criterion, subsheaf closure;
//   run_metamorphic  restriction/locality invariance on a seeded corpus and
//                    the exhaustive support-stability battery;
//   run_check        validity of one formula in the selected model;
//   run_eval         truth of one formula at one team / world assignment,
//                    with an atom trace for failures.
//
// Suites with many independent items distribute them over a worker pool of
// `jobs` threads; items are pure and results are merged in canonical order,
// so reports do not depend on the degree of parallelism.

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "sheaflogic/formula.hpp"
#include "sheaflogic/report.hpp"

namespace sheaflogic {

struct RunConfig {
    std::string model = "multiteam"; // "multiteam" | "schanuel"

    // Axiom grids: carrier sizes instantiated for the multiteam grids (the
    // schanuel grids quantify over name sorts instead), and the world bound
    // for schanuel validity.
    std::vector<int> sort_sizes = {2};
    int world_bound = 3;

    // Budgets.
    long long max_teams = 1LL << 12; // per validity check
    int category_bound = 3;          // object-size bound for category suites
    int corpus_count = 500;
    int metamorphic_count = 1000;

    std::uint64_t seed = 1;
    int jobs = 1;

    void validate() const;
    nlohmann::json to_json() const;
};

SuiteReport run_axioms(const RunConfig& cfg);
SuiteReport run_oracle_diff(const RunConfig& cfg);
SuiteReport run_category(const RunConfig& cfg);
SuiteReport run_metamorphic(const RunConfig& cfg);

// Validity of one formula. Free variables take their sorts from the file's
// `var` declarations; variables left undeclared default to the signature's
// first sort. The multiteam route enumerates teams under the team budget;
// the schanuel route enumerates worlds up to world_bound.
SuiteReport run_check(const RunConfig& cfg, const Signature& sig, const ParsedFormulaFile& file);

// Truth at a single instance. Multiteam instances are team JSON
// ({"context": [...], "rows": [...]}); schanuel instances are world
// assignments ({"world": n, "rho": {"x": [names...], ...}}). A false
// verdict carries a trace of every atom whose variables are all free.
SuiteReport run_eval(const RunConfig& cfg, const Signature& sig, const ParsedFormulaFile& file,
                     const nlohmann::json& instance);

// The built-in signature a model's suites run over when none is supplied.
const Signature& default_signature(const std::string& model);

// The shared 12-formula battery used for the invariance and
// existence-preservation schemas: side formulas over a three-variable frame
// (p, q, r). `sort_name` is the frame/quantifier sort; relation atoms are
// included only when the signature declares relation D (the schanuel
// battery replaces them).
std::vector<FormulaPtr> phi_battery(const std::string& sort_name, bool with_relation);
const std::vector<std::string>& phi_battery_frame();

} // namespace sheaflogic
