// Forcing oracle: literal truth clauses over explicit sample sets, with
// quantifiers enumerating canonical refinements of the sample set.

#include "sheaflogic/forcing.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>

#include "sheaflogic/errors.hpp"

namespace sheaflogic {

void Assignment::validate() const {
    for (const auto& [name, var] : bindings)
        if (!(var.sample == sample))
            throw invalid_input("assignment: variable '" + name +
                                "' lives on a different sample set");
}

int witness_bound(const FinSet& omega, const SortValueSet& sort) {
    return omega.size * sort.size();
}

Assignment restrict_assignment(const Assignment& rho, const FinSurjection& c) {
    if (!(c.cod == rho.sample))
        throw invalid_input("restrict_assignment: map does not target the sample set");
    Assignment out;
    out.sample = c.dom;
    for (const auto& [name, var] : rho.bindings) out.bindings.emplace(name, restrict_var(var, c));
    return out;
}

namespace {

class Forcer {
public:
    Forcer(const Signature& sig, const ForceOptions& opts) : sig_(sig), opts_(opts) {}

    bool run(const FormulaPtr& f, const Assignment& rho);

private:
    const Signature& sig_;
    ForceOptions opts_;
    std::unordered_map<std::string, bool> memo_;

    static const NondetVar& lookup(const Assignment& rho, const std::string& v) {
        auto it = rho.bindings.find(v);
        if (it == rho.bindings.end()) throw invalid_input("force: unbound variable '" + v + "'");
        return it->second;
    }

    static std::vector<std::vector<int>> tuple_rows(const Assignment& rho,
                                                    const std::vector<std::string>& vars) {
        std::vector<const NondetVar*> cols;
        cols.reserve(vars.size());
        for (const auto& v : vars) cols.push_back(&lookup(rho, v));
        std::vector<std::vector<int>> rows(static_cast<size_t>(rho.sample.size));
        for (int w = 0; w < rho.sample.size; ++w) {
            auto& row = rows[static_cast<size_t>(w)];
            row.reserve(cols.size());
            for (const auto* c : cols) row.push_back((*c)(w));
        }
        return rows;
    }

    bool dispatch(const FormulaPtr& f, const Assignment& rho);
    bool atom_equiv(const Formula& f, const Assignment& rho);
    bool atom_indep(const Formula& f, const Assignment& rho);
    bool atom_rel(const Formula& f, const Assignment& rho);
    bool quantifier(const FormulaPtr& f, const Assignment& rho);
};

bool Forcer::run(const FormulaPtr& f, const Assignment& rho) {
    switch (f->kind) {
        case FKind::Eq:
            return lookup(rho, f->xs[0]).values == lookup(rho, f->xs[1]).values;
        case FKind::Rel: return atom_rel(*f, rho);
        case FKind::Not: return !run(f->lhs, rho);
        case FKind::And: return run(f->lhs, rho) && run(f->rhs, rho);
        case FKind::Or: return run(f->lhs, rho) || run(f->rhs, rho);
        case FKind::Implies: return !run(f->lhs, rho) || run(f->rhs, rho);
        default: break;
    }

    // Equivalence, independence and quantifiers: memoized on the full
    // binding context up to sample-set isomorphism, i.e. on the multiset of
    // joint value rows (the same quotient the canonical refinement
    // enumeration already takes).
    std::string key;
    const Formula* node = f.get();
    key.append(reinterpret_cast<const char*>(&node), sizeof(node));
    const int n = rho.sample.size;
    key.append(reinterpret_cast<const char*>(&n), sizeof(n));
    for (const auto& [name, var] : rho.bindings) {
        key += name;
        key += '\x1f';
        key += var.sort->name;
        key += '\x1f';
    }
    {
        std::vector<std::vector<int>> rows(static_cast<size_t>(n));
        for (int w = 0; w < n; ++w)
            for (const auto& [name, var] : rho.bindings)
                rows[static_cast<size_t>(w)].push_back(var(w));
        std::sort(rows.begin(), rows.end());
        for (const auto& row : rows)
            for (int v : row) key.append(reinterpret_cast<const char*>(&v), sizeof(v));
    }
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    bool value = dispatch(f, rho);
    if (memo_.size() >= opts_.memo_limit) memo_.clear();
    memo_.emplace(std::move(key), value);
    return value;
}

bool Forcer::dispatch(const FormulaPtr& f, const Assignment& rho) {
    switch (f->kind) {
        case FKind::Equiv: return atom_equiv(*f, rho);
        case FKind::Indep: return atom_indep(*f, rho);
        case FKind::Exists:
        case FKind::Forall: return quantifier(f, rho);
        default: throw invalid_input("force: unexpected formula node");
    }
}

bool Forcer::atom_equiv(const Formula& f, const Assignment& rho) {
    auto lhs = tuple_rows(rho, f.xs);
    auto rhs = tuple_rows(rho, f.ys);
    std::set<std::vector<int>> l(lhs.begin(), lhs.end()), r(rhs.begin(), rhs.end());
    return l == r;
}

bool Forcer::atom_indep(const Formula& f, const Assignment& rho) {
    auto xs = tuple_rows(rho, f.xs);
    auto ys = tuple_rows(rho, f.ys);
    auto zs = tuple_rows(rho, f.zs);
    const size_t n = xs.size();
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            if (zs[i] != zs[j]) continue;
            bool found = false;
            for (size_t w = 0; w < n && !found; ++w)
                found = xs[w] == xs[i] && ys[w] == ys[j] && zs[w] == zs[i];
            if (!found) return false;
        }
    return true;
}

bool Forcer::atom_rel(const Formula& f, const Assignment& rho) {
    const RelationDecl* decl = sig_.find_relation(f.name);
    if (!decl) throw invalid_input("force: unknown relation '" + f.name + "'");
    const NondetVar& x = lookup(rho, f.xs[0]);
    std::vector<char> member(static_cast<size_t>(x.sort->size()), 0);
    for (const auto& a : decl->atoms) {
        int idx = x.sort->index_of(a);
        if (idx < 0)
            throw invalid_input("force: relation '" + f.name + "' mentions '" + a +
                                "', not in sort '" + x.sort->name + "'");
        member[static_cast<size_t>(idx)] = 1;
    }
    if (decl->mode == RelationDecl::Mode::box) {
        for (int w = 0; w < rho.sample.size; ++w)
            if (!member[static_cast<size_t>(x(w))]) return false;
        return true;
    }
    for (int w = 0; w < rho.sample.size; ++w)
        if (member[static_cast<size_t>(x(w))]) return true;
    return false;
}

bool Forcer::quantifier(const FormulaPtr& f, const Assignment& rho) {
    const bool existential = f->kind == FKind::Exists;
    SortPtr carrier = sig_.carrier(f->sort_name);
    const int k = rho.sample.size;
    const int c = carrier->size();
    const int bound = witness_bound(rho.sample, *carrier) * std::max(opts_.bound_factor, 1);
    if (bound > opts_.max_sample)
        throw resource_exceeded("force: quantifier over '" + f->sort_name +
                                "' needs sample sets up to size " + std::to_string(bound) +
                                " (cap " + std::to_string(opts_.max_sample) + ")");

    // Fiber sizes of the refinement, each >= 1, total <= bound, in
    // lexicographic order; the refinement lays fibers out as consecutive
    // blocks over {0..total-1}.
    std::vector<int> fib(static_cast<size_t>(k), 1);
    while (true) {
        const int total = std::accumulate(fib.begin(), fib.end(), 0);
        {
            std::vector<int> fmap;
            fmap.reserve(static_cast<size_t>(total));
            for (int i = 0; i < k; ++i)
                fmap.insert(fmap.end(), static_cast<size_t>(fib[static_cast<size_t>(i)]), i);
            FinSurjection refine(FinSet(total), rho.sample, std::move(fmap));
            Assignment base = restrict_assignment(rho, refine);

            // New variable's values: nondecreasing within each fiber block.
            std::vector<int> x(static_cast<size_t>(total), 0);
            std::vector<int> block_start(static_cast<size_t>(total), 0);
            {
                int pos = 0;
                for (int i = 0; i < k; ++i)
                    for (int b = 0; b < fib[static_cast<size_t>(i)]; ++b, ++pos)
                        block_start[static_cast<size_t>(pos)] = (b == 0);
            }
            while (true) {
                Assignment ext = base;
                ext.bindings.insert_or_assign(f->name, NondetVar(FinSet(total), carrier, x));
                bool v = run(f->lhs, ext);
                if (v == existential) return existential;
                int p = total - 1;
                while (p >= 0 && x[static_cast<size_t>(p)] == c - 1) --p;
                if (p < 0) break;
                ++x[static_cast<size_t>(p)];
                for (int q = p + 1; q < total; ++q)
                    x[static_cast<size_t>(q)] =
                        block_start[static_cast<size_t>(q)] ? 0 : x[static_cast<size_t>(q - 1)];
            }
        }
        // Next fiber-size vector with the sum still within the bound.
        int p = k - 1;
        while (p >= 0) {
            int prefix = 0;
            for (int i = 0; i <= p; ++i) prefix += fib[static_cast<size_t>(i)];
            if (prefix + 1 + (k - 1 - p) <= bound) break;
            --p;
        }
        if (p < 0) break;
        ++fib[static_cast<size_t>(p)];
        for (int q = p + 1; q < k; ++q) fib[static_cast<size_t>(q)] = 1;
    }
    return !existential;
}

} // namespace

bool force(const Assignment& rho, const FormulaPtr& f, const Signature& sig,
           const ForceOptions& opts) {
    rho.validate();
    Context ctx;
    for (const auto& [name, var] : rho.bindings) {
        SortPtr declared = sig.carrier(var.sort->name);
        if (!(*declared == *var.sort))
            throw invalid_input("force: binding for '" + name +
                                "' uses a carrier that disagrees with the signature");
        ctx.push(name, var.sort->name);
    }
    typecheck(*f, ctx, sig);
    Forcer fo(sig, opts);
    return fo.run(f, rho);
}

bool metamorphic_check(const Assignment& rho, const FormulaPtr& f, const FinSurjection& c,
                       const Signature& sig, const ForceOptions& opts) {
    const bool base = force(rho, f, sig, opts);
    const bool restricted = force(restrict_assignment(rho, c), f, sig, opts);
    Assignment local;
    local.sample = rho.sample;
    for (const auto& v : free_vars(*f)) {
        auto it = rho.bindings.find(v);
        if (it == rho.bindings.end())
            throw invalid_input("metamorphic_check: unbound variable '" + v + "'");
        local.bindings.emplace(v, it->second);
    }
    const bool dropped = force(local, f, sig, opts);
    return base == restricted && base == dropped;
}

nlohmann::json to_json(const Assignment& rho) {
    nlohmann::json vars = nlohmann::json::object();
    for (const auto& [name, var] : rho.bindings) vars[name] = to_json(var);
    return {{"omega", rho.sample.size}, {"rho", std::move(vars)}};
}

Assignment assignment_from_json(const nlohmann::json& j, const Signature& sig) {
    if (!j.is_object() || !j.contains("omega") || !j.contains("rho"))
        throw invalid_input("assignment: expected an object with 'omega' and 'rho'");
    Assignment out;
    out.sample = FinSet(j.at("omega").get<int>());
    std::vector<SortPtr> known;
    for (const auto& s : sig.sorts)
        if (s.kind == SortDecl::Kind::enumerated) known.push_back(s.carrier);
    for (const auto& [name, jvar] : j.at("rho").items())
        out.bindings.emplace(name, nondet_var_from_json(jvar, known));
    out.validate();
    return out;
}

} // namespace sheaflogic
