// Seeded corpus generation for differential testing of the two evaluation
// routes, with saturating static cost estimates used as a rejection gate.

#include "sheaflogic/corpus.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "sheaflogic/errors.hpp"

namespace sheaflogic {

namespace {

constexpr long long kSat = 1LL << 60;

long long sat_add(long long a, long long b) {
    if (a >= kSat - b) return kSat;
    return a + b;
}

long long sat_mul(long long a, long long b) {
    if (a == 0 || b == 0) return 0;
    if (a >= kSat / b) return kSat;
    return a * b;
}

// C(n + s - 1, s - 1): nondecreasing value tuples of length n over s values.
long long multisets(long long n, long long s) {
    long long r = 1;
    for (long long i = 1; i < s; ++i) {
        if (r > kSat / (n + i)) return kSat;
        r = r * (n + i) / i; // integral at every step
    }
    return r;
}

// Number of (fiber sizes, per-fiber value multiset) pairs when a sample of
// size n is refined to size m over a sort of size s: the oracle enumerates
// exactly these per quantifier candidate.
long long refinement_ways(int n, int m, int s) {
    // ways[k][t] = choices for the first k fibers totalling t points
    std::vector<std::vector<long long>> ways(static_cast<size_t>(n) + 1,
                                             std::vector<long long>(static_cast<size_t>(m) + 1, 0));
    ways[0][0] = 1;
    for (int k = 1; k <= n; ++k)
        for (int t = k; t <= m; ++t)
            for (int b = 1; t - b >= k - 1; ++b)
                ways[static_cast<size_t>(k)][static_cast<size_t>(t)] =
                    sat_add(ways[static_cast<size_t>(k)][static_cast<size_t>(t)],
                            sat_mul(multisets(b, s),
                                    ways[static_cast<size_t>(k) - 1][static_cast<size_t>(t - b)]));
    return ways[static_cast<size_t>(n)][static_cast<size_t>(m)];
}

int sort_size(const Signature& sig, const std::string& name) {
    return sig.carrier(name)->size();
}

// Uniform draw from 0..n-1 off the raw engine; avoids distribution objects
// so the stream is identical across standard-library implementations.
int rand_below(std::mt19937_64& rng, int n) {
    return static_cast<int>(rng() % static_cast<std::uint64_t>(n));
}

const std::vector<std::string>& pool_names() {
    static const std::vector<std::string> names = {"x", "y", "z", "u", "v", "w"};
    return names;
}

struct Gen {
    std::mt19937_64& rng;
    int sample = 1;
    int quant_counter = 0;

    FormulaPtr atom(const Context& ctx) {
        // Group the variables in scope by sort for the sorted atoms.
        std::vector<std::string> of_a, of_b;
        for (const auto& [v, s] : ctx.vars) (s == "A" ? of_a : of_b).push_back(v);
        const auto pick_same_sort = [&]() -> const std::vector<std::string>& {
            if (of_a.empty()) return of_b;
            if (of_b.empty()) return of_a;
            return rand_below(rng, 2) == 0 ? of_a : of_b;
        };
        const auto any_var = [&]() {
            return ctx.vars[static_cast<size_t>(rand_below(rng, static_cast<int>(ctx.vars.size())))]
                .first;
        };
        int roll = rand_below(rng, 100);
        if (roll < 30) { // equivalence, componentwise equal sorts
            int len = rand_below(rng, 3);
            std::vector<std::string> xs, ys;
            for (int i = 0; i < len; ++i) {
                const auto& vars = pick_same_sort();
                xs.push_back(vars[static_cast<size_t>(rand_below(rng, static_cast<int>(vars.size())))]);
                ys.push_back(vars[static_cast<size_t>(rand_below(rng, static_cast<int>(vars.size())))]);
            }
            return f_equiv(std::move(xs), std::move(ys));
        }
        if (roll < 60) { // conditional independence, arbitrary sorts
            std::vector<std::string> vecs[3];
            for (auto& vec : vecs) {
                int len = rand_below(rng, 3);
                for (int i = 0; i < len; ++i) vec.push_back(any_var());
            }
            return f_indep(std::move(vecs[0]), std::move(vecs[1]), std::move(vecs[2]));
        }
        if (roll < 80 || of_a.empty()) { // equality on a shared sort
            const auto& vars = pick_same_sort();
            std::string l = vars[static_cast<size_t>(rand_below(rng, static_cast<int>(vars.size())))];
            std::string r = vars[static_cast<size_t>(rand_below(rng, static_cast<int>(vars.size())))];
            return f_eq(std::move(l), std::move(r));
        }
        // declared relation (needs a variable of its argument sort)
        return f_rel("D", {of_a[static_cast<size_t>(rand_below(rng, static_cast<int>(of_a.size())))]});
    }

    FormulaPtr formula(int depth_left, int budget, bool under_quantifier, const Context& ctx) {
        if (budget <= 1) return atom(ctx);
        int roll = rand_below(rng, 100);
        if (roll < 40) return atom(ctx);
        if (roll < 50) return f_not(formula(depth_left, budget - 1, under_quantifier, ctx));
        if (roll < 84) {
            int half = (budget - 1) / 2;
            auto lhs = formula(depth_left, half, under_quantifier, ctx);
            auto rhs = formula(depth_left, budget - 1 - half, under_quantifier, ctx);
            if (roll < 62) return f_and(std::move(lhs), std::move(rhs));
            if (roll < 74) return f_or(std::move(lhs), std::move(rhs));
            return f_implies(std::move(lhs), std::move(rhs));
        }
        // Quantifier. Nesting is only offered where both evaluation routes
        // stay cheap: an inner quantifier requires a small sample and is
        // pinned to the size-2 sort (the cost gate re-checks the result).
        if (depth_left == 0 || (under_quantifier && sample > 2)) return atom(ctx);
        std::string sort = under_quantifier || rand_below(rng, 2) == 0 ? "A" : "B";
        std::string var = "q" + std::to_string(++quant_counter);
        Context inner = ctx;
        inner.push(var, sort);
        auto body = formula(depth_left - 1, budget - 1, true, inner);
        return rand_below(rng, 2) == 0 ? f_exists(var, sort, std::move(body))
                                       : f_forall(var, sort, std::move(body));
    }
};

} // namespace

const Signature& corpus_signature() {
    static const Signature sig = parse_signature("sort A = {a, b}\n"
                                                 "sort B = 3\n"
                                                 "rel D = diamond A {a}\n");
    return sig;
}

long long estimate_force_cost(const FormulaPtr& f, int sample, const Signature& sig,
                              int bound_factor) {
    switch (f->kind) {
        case FKind::Eq:
        case FKind::Equiv:
        case FKind::Indep:
        case FKind::Rel:
            return sat_add(sat_mul(sample, sample), 4);
        case FKind::Not:
            return sat_add(1, estimate_force_cost(f->lhs, sample, sig, bound_factor));
        case FKind::And:
        case FKind::Or:
        case FKind::Implies:
            return sat_add(1, sat_add(estimate_force_cost(f->lhs, sample, sig, bound_factor),
                                      estimate_force_cost(f->rhs, sample, sig, bound_factor)));
        case FKind::Exists:
        case FKind::Forall: {
            int s = sort_size(sig, f->sort_name);
            int bound = sample * s * bound_factor;
            long long total = 1;
            for (int m = sample; m <= bound; ++m)
                total = sat_add(total,
                                sat_mul(refinement_ways(sample, m, s),
                                        sat_add(2, estimate_force_cost(f->lhs, m, sig,
                                                                       bound_factor))));
            return total;
        }
    }
    return kSat;
}

long long estimate_eval_cost(const FormulaPtr& f, int rows, const Signature& sig) {
    switch (f->kind) {
        case FKind::Eq:
        case FKind::Equiv:
        case FKind::Rel:
            return sat_add(sat_mul(rows, rows), 4);
        case FKind::Indep:
            return sat_add(sat_mul(rows, sat_mul(rows, rows)), 4);
        case FKind::Not:
            return sat_add(1, estimate_eval_cost(f->lhs, rows, sig));
        case FKind::And:
        case FKind::Or:
        case FKind::Implies:
            return sat_add(1, sat_add(estimate_eval_cost(f->lhs, rows, sig),
                                      estimate_eval_cost(f->rhs, rows, sig)));
        case FKind::Exists:
        case FKind::Forall: {
            int s = sort_size(sig, f->sort_name);
            long long per_row = (1LL << s) - 1; // nonempty subsets of the carrier
            long long ext = 1;
            for (int i = 0; i < rows; ++i) ext = sat_mul(ext, per_row);
            return sat_add(1, sat_mul(ext, sat_add(2, estimate_eval_cost(f->lhs, rows * s, sig))));
        }
    }
    return kSat;
}

std::vector<CorpusItem> make_corpus(std::uint64_t seed, const CorpusOptions& opts) {
    if (opts.count < 0 || opts.max_sample < 1 || opts.max_vars < 1 ||
        opts.max_vars > static_cast<int>(pool_names().size()) || opts.max_depth < 0)
        throw invalid_input("corpus options out of range");
    const Signature& sig = corpus_signature();
    std::mt19937_64 rng(seed);
    std::vector<CorpusItem> out;
    out.reserve(static_cast<size_t>(opts.count));
    long long attempts_left = 10000LL + 2000LL * opts.count;
    while (static_cast<int>(out.size()) < opts.count) {
        if (--attempts_left < 0)
            throw resource_exceeded("corpus generation: rejection budget exhausted; "
                                    "raise the per-item cost budgets");
        CorpusItem item;
        int n = 1 + rand_below(rng, opts.max_sample);
        int k = 1 + rand_below(rng, opts.max_vars);
        item.rho.sample = FinSet(n);
        Context ctx;
        for (int i = 0; i < k; ++i) {
            const std::string& name = pool_names()[static_cast<size_t>(i)];
            std::string sort = rand_below(rng, 2) == 0 ? "A" : "B";
            SortPtr carrier = sig.carrier(sort);
            std::vector<int> values(static_cast<size_t>(n));
            for (auto& v : values) v = rand_below(rng, carrier->size());
            item.rho.bindings.emplace(name, NondetVar(FinSet(n), carrier, std::move(values)));
            ctx.push(name, sort);
        }
        Gen gen{rng, n, 0};
        item.formula = gen.formula(opts.max_depth, 7, false, ctx);
        if (estimate_force_cost(item.formula, n, sig) > opts.max_force_cost) continue;
        if (estimate_eval_cost(item.formula, n, sig) > opts.max_eval_cost) continue;
        out.push_back(std::move(item));
    }
    return out;
}

nlohmann::json to_json(const CorpusItem& item) {
    nlohmann::json j = to_json(item.rho);
    j["formula"] = print_formula(item.formula);
    return j;
}

} // namespace sheaflogic
