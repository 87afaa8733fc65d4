#pragma once

// A literal forcing oracle over explicit sample sets, used to validate the
// team evaluator. Truth at a sample set under an assignment of
// nondeterministic variables: atoms compare images and check conditional
// independence pointwise, connectives are classical, and a quantifier
// ranges over every refinement of the sample set along a surjection
// together with every value map for the new variable on the refined set.
//
// The enumeration visits one representative per isomorphism class of
// refinement: fibers are laid out as consecutive blocks and the new
// variable's values are nondecreasing within each block. Sample sizes are
// capped at witness_bound (|sample| * |carrier|), which suffices because
// any refinement's effect on truth is realized by the compatible pairs
// inside sample * carrier; raising the cap must never change a verdict,
// and the team evaluator provides the independent cross-check.

#include <map>
#include <string>

#include <json.hpp>

#include "sheaflogic/fincat.hpp"
#include "sheaflogic/formula.hpp"
#include "sheaflogic/multiteam.hpp"

namespace sheaflogic {

struct Assignment {
    FinSet sample{1};
    std::map<std::string, NondetVar> bindings;

    void validate() const; // bindings all live on `sample`
};

struct ForceOptions {
    int max_sample = 128;        // refuse refinements beyond this sample size
    int bound_factor = 1;        // scale witness_bound (stability experiments)
    size_t memo_limit = 1u << 22;
};

// Smallest refinement size that is always sufficient for one quantifier.
int witness_bound(const FinSet& omega, const SortValueSet& sort);

// Restriction of every binding along c (precomposition); the result lives
// on c's domain.
Assignment restrict_assignment(const Assignment& rho, const FinSurjection& c);

// Truth of f at rho's sample set under rho. Throws invalid_input for
// unbound variables and resource_exceeded when a quantifier would need a
// sample set larger than opts.max_sample.
bool force(const Assignment& rho, const FormulaPtr& f, const Signature& sig,
           const ForceOptions& opts = {});

// Invariance battery for one instance: truth is unchanged by restriction
// along c and by dropping bindings outside FV(f). Returns the conjunction
// of the two comparisons.
bool metamorphic_check(const Assignment& rho, const FormulaPtr& f, const FinSurjection& c,
                       const Signature& sig, const ForceOptions& opts = {});

nlohmann::json to_json(const Assignment& rho);
Assignment assignment_from_json(const nlohmann::json& j, const Signature& sig);

} // namespace sheaflogic
