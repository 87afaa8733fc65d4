#pragma once

// Seeded corpora of (assignment, formula) instances for differential
// testing: the same instance is evaluated by the forcing oracle and by the
// team evaluator, and the two verdicts must agree.
//
// The generator draws sample sizes, variable sorts, values and formula
// shapes from a single pseudo-random stream, so a fixed seed reproduces the
// corpus byte for byte. Draws whose statically estimated cost exceeds the
// per-item budget are rejected and redrawn as part of the same stream;
// rejection keeps every emitted item decidable by both routes well inside
// the acceptance time budget while still reaching the configured maxima.
// Atoms are biased toward the equivalence and conditional-independence
// relations, which carry the interesting semantics.

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "sheaflogic/forcing.hpp"
#include "sheaflogic/formula.hpp"

namespace sheaflogic {

struct CorpusOptions {
    int count = 500;   // items to emit
    int max_sample = 3; // sample sizes drawn from 1..max_sample
    int max_vars = 3;   // assignment widths drawn from 1..max_vars
    int max_depth = 2;  // quantifier nesting depth
    // Per-item budgets for the static cost estimates. Items estimated above
    // either budget are redrawn.
    long long max_force_cost = 200000;
    long long max_eval_cost = 4000000;
};

struct CorpusItem {
    Assignment rho;
    FormulaPtr formula;
};

// The fixed two-sort signature the corpus draws from: one sort of size 2,
// one of size 3, and one diamond relation to exercise relation atoms.
const Signature& corpus_signature();

// Deterministic corpus for the given seed. Every item satisfies
// FV(formula) ⊆ dom(rho), |sample| <= max_sample and quantifier depth
// <= max_depth, and passes both cost estimates.
std::vector<CorpusItem> make_corpus(std::uint64_t seed, const CorpusOptions& opts = {});

// Upper estimate of the work force() does on f at a sample of the given
// size: quantifiers are charged one unit per (refinement, value-map) pair
// they enumerate, atoms one unit per sample point. Saturates instead of
// overflowing. bound_factor mirrors the oracle option of the same name.
long long estimate_force_cost(const FormulaPtr& f, int sample, const Signature& sig,
                              int bound_factor = 1);

// Companion estimate for eval() on the team of an assignment of the given
// size: quantifiers are charged the full extension count at the largest
// team they can face (hints only ever shrink the real work).
long long estimate_eval_cost(const FormulaPtr& f, int rows, const Signature& sig);

nlohmann::json to_json(const CorpusItem& item);

} // namespace sheaflogic
