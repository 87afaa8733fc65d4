#pragma once

// Exact evaluation of formulas over finite team models.
//
// A team is the joint image of an assignment of nondeterministic variables:
// a nonempty set of rows, one column per context variable. Truth of a
// formula depends only on this image (truth is invariant under restriction
// along surjections, local to the free variables, and insensitive to how
// often a row is realized), so the evaluator works on teams directly.
//
// Quantifiers range over team extensions: a new column is adjoined by
// choosing, for every existing row, a nonempty subset of the new sort's
// carrier. Both quantifiers range over the same extension set. The
// existential quantifier tries a family of deterministic witness candidates
// (copies of existing columns, constants, and conditional copies keyed on
// matching columns) before falling back to exhaustive enumeration; this is
// a pure reordering and never changes verdicts.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sheaflogic/formula.hpp"
#include "sheaflogic/multiteam.hpp"

namespace sheaflogic {

struct Team {
    Context context;                    // (variable, sort name), distinct names
    std::vector<SortPtr> carriers;      // one carrier per context entry
    std::vector<std::vector<int>> rows; // sorted, duplicate-free, nonempty

    void validate() const;
    int width() const { return static_cast<int>(context.vars.size()); }
    int size() const { return static_cast<int>(rows.size()); }
};

// The joint image of an assignment: one row per sample point, deduplicated
// and sorted. All variables must live on the given sample set.
Team team_of_assignment(const FinSet& omega,
                        const std::vector<std::pair<std::string, NondetVar>>& rho);

// Restriction of a team to a subset of its columns (image of the projection).
Team project(const Team& team, const std::vector<std::string>& vars);

struct EvalOptions {
    // Budget for one validity check, counted in teams.
    long long max_teams = 1LL << 20;
    // Budget for one quantifier node, counted in candidate extensions.
    long long max_extensions = 1LL << 22;
    // Try deterministic witness candidates before enumerating (existential
    // short cut / universal counterexample probe). Never changes verdicts.
    bool witness_hints = true;
    // Entries kept in the evaluation memo before it is dropped.
    size_t memo_limit = 1u << 22;
};

// Truth of f over the team, per the semantics in the header comment.
// Throws invalid_input for unbound variables and resource_exceeded when a
// quantifier's extension set exceeds opts.max_extensions undecided.
bool eval(const FormulaPtr& f, const Team& team, const Signature& sig,
          const EvalOptions& opts = {});

// All extension teams of `team` by a fresh variable of the given sort.
// Their number is (2^|carrier| - 1)^rows, so only call this at test scale.
std::vector<Team> extensions(const Team& team, const std::string& var, const std::string& sort,
                             const Signature& sig);

enum class Validity { valid, invalid, resource_exceeded };

const char* to_string(Validity v);

struct Verdict {
    Validity status = Validity::valid;
    // True when every nonempty team over the free variables was checked.
    // Bounded checks (status valid, exhaustive false) covered all teams of
    // size <= max_rows_checked without finding a countermodel.
    bool exhaustive = false;
    long long teams_checked = 0;
    int max_rows_checked = 0;
    std::optional<Team> countermodel;
};

// Validity of f under all assignments: strips the leading universal prefix
// (sound: the teams reachable from the one-point team by universal
// extensions are exactly all nonempty teams over the prefix variables),
// then evaluates the matrix at every team over its free variables in
// canonical order (size, then lexicographic). Teams are enumerated in
// complete size tiers while the budget allows; a countermodel found within
// the budget is definitive, and status resource_exceeded is returned only
// when not even the single-row tier fits.
//
// free_ctx supplies sorts for the free variables of f (may be empty for
// sentences).
Verdict valid(const FormulaPtr& f, const Context& free_ctx, const Signature& sig,
              const EvalOptions& opts = {});

nlohmann::json to_json(const Team& team);
Team team_from_json(const nlohmann::json& j, const Signature& sig);
nlohmann::json to_json(const Verdict& v);

} // namespace sheaflogic
