// SPDX-License-Identifier: MIT

#include "sheaflogic/schanuel.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "sheaflogic/errors.hpp"
#include "sheaflogic/ip_axioms.hpp"

namespace sheaflogic {

NameSet::NameSet(int n) : size(n) {
    if (n < 0) throw invalid_input("name set: negative size");
}

bool operator==(const NameSet& a, const NameSet& b) { return a.size == b.size; }
bool operator!=(const NameSet& a, const NameSet& b) { return !(a == b); }

IopMap::IopMap(NameSet dom_, NameSet cod_, std::vector<int> emb_)
    : dom(dom_), cod(cod_), emb(std::move(emb_)) {
    validate();
}

void IopMap::validate() const {
    if (static_cast<int>(emb.size()) != cod.size)
        throw invalid_input("world map: embedding has " + std::to_string(emb.size()) +
                            " entries for a codomain of size " + std::to_string(cod.size));
    std::vector<char> seen(static_cast<size_t>(dom.size), 0);
    for (int v : emb) {
        if (v < 0 || v >= dom.size) throw invalid_input("world map: name out of range");
        if (seen[static_cast<size_t>(v)]++) throw invalid_input("world map: embedding not injective");
    }
}

bool operator==(const IopMap& a, const IopMap& b) {
    return a.dom == b.dom && a.cod == b.cod && a.emb == b.emb;
}
bool operator!=(const IopMap& a, const IopMap& b) { return !(a == b); }

IopMap iop_identity(NameSet x) {
    std::vector<int> e(static_cast<size_t>(x.size));
    std::iota(e.begin(), e.end(), 0);
    return IopMap(x, x, std::move(e));
}

IopMap iop_compose(const IopMap& f, const IopMap& g) {
    if (f.cod != g.dom)
        throw invalid_input("compose: codomain of first map (size " + std::to_string(f.cod.size) +
                            ") != domain of second (size " + std::to_string(g.dom.size) + ")");
    std::vector<int> e(g.emb.size());
    for (size_t i = 0; i < g.emb.size(); ++i) e[i] = f.emb[static_cast<size_t>(g.emb[i])];
    return IopMap(f.dom, g.cod, std::move(e));
}

IopMap iop_inclusion(NameSet world, NameSet base) {
    if (base.size > world.size) throw invalid_input("inclusion: base world is larger");
    std::vector<int> e(static_cast<size_t>(base.size));
    std::iota(e.begin(), e.end(), 0);
    return IopMap(world, base, std::move(e));
}

std::vector<IopMap> all_iop_maps(NameSet dom, NameSet cod) {
    std::vector<IopMap> out;
    if (cod.size > dom.size) return out;
    std::vector<int> emb;
    std::vector<char> used(static_cast<size_t>(dom.size), 0);
    // Depth-first over partial injections in lexicographic order.
    const auto rec = [&](const auto& self) -> void {
        if (static_cast<int>(emb.size()) == cod.size) {
            out.push_back(IopMap(dom, cod, emb));
            return;
        }
        for (int v = 0; v < dom.size; ++v) {
            if (used[static_cast<size_t>(v)]) continue;
            used[static_cast<size_t>(v)] = 1;
            emb.push_back(v);
            self(self);
            emb.pop_back();
            used[static_cast<size_t>(v)] = 0;
        }
    };
    rec(rec);
    return out;
}

void IopSquare::validate() const {
    p.validate();
    q.validate();
    r.validate();
    s.validate();
    if (p.dom != q.dom) throw invalid_input("square: span legs leave different apexes");
    if (p.cod != r.dom || q.cod != s.dom) throw invalid_input("square: edges do not meet");
    if (r.cod != s.cod) throw invalid_input("square: cospan legs target different worlds");
    if (iop_compose(p, r) != iop_compose(q, s)) throw invalid_input("square does not commute");
}

bool iop_is_independent(const IopSquare& sq) {
    sq.validate();
    // Pullback test on the associated injections: every collision of the two
    // embeddings into the apex is witnessed by a name of the corner world.
    for (int y = 0; y < sq.p.cod.size; ++y)
        for (int z = 0; z < sq.q.cod.size; ++z) {
            if (sq.p.emb[static_cast<size_t>(y)] != sq.q.emb[static_cast<size_t>(z)]) continue;
            bool hit = false;
            for (int w = 0; w < sq.r.cod.size && !hit; ++w)
                hit = sq.r.emb[static_cast<size_t>(w)] == y && sq.s.emb[static_cast<size_t>(w)] == z;
            if (!hit) return false;
        }
    return true;
}

bool iop_is_independent_pullback(const IopSquare& sq) {
    if (!iop_is_independent(sq)) return false;
    std::vector<char> hit(static_cast<size_t>(sq.p.dom.size), 0);
    for (int v : sq.p.emb) hit[static_cast<size_t>(v)] = 1;
    for (int v : sq.q.emb) hit[static_cast<size_t>(v)] = 1;
    return std::all_of(hit.begin(), hit.end(), [](char c) { return c != 0; });
}

IopSquare iop_independent_pullback(const IopMap& r, const IopMap& s) {
    r.validate();
    s.validate();
    if (r.cod != s.cod) throw invalid_input("completion: cospan legs target different worlds");
    const int ny = r.dom.size, nz = s.dom.size, nw = r.cod.size;
    // Pushout of the associated span of injections: names of Y keep their
    // ids, names of Z shared through W collapse onto them, the rest follow.
    std::vector<int> cls(static_cast<size_t>(nz), -1);
    for (int w = 0; w < nw; ++w)
        cls[static_cast<size_t>(s.emb[static_cast<size_t>(w)])] = r.emb[static_cast<size_t>(w)];
    int next = ny;
    for (int z = 0; z < nz; ++z)
        if (cls[static_cast<size_t>(z)] < 0) cls[static_cast<size_t>(z)] = next++;
    const NameSet apex(ny + nz - nw);
    std::vector<int> py(static_cast<size_t>(ny));
    std::iota(py.begin(), py.end(), 0);
    return IopSquare{IopMap(apex, r.dom, std::move(py)), IopMap(apex, s.dom, std::move(cls)), r,
                     s};
}

namespace {

// Site adapter plugging the opposite injection category into the generic
// independent-pullback checker. Objects are world sizes, the empty world
// included.
struct IopSite {
    using Map = IopMap;

    mutable std::map<std::pair<int, int>, std::vector<Map>> hom_cache;

    std::vector<int> objects(int bound) const {
        std::vector<int> out;
        for (int n = 0; n <= bound; ++n) out.push_back(n);
        return out;
    }
    const std::vector<Map>& hom(int a, int b) const {
        auto it = hom_cache.find({a, b});
        if (it == hom_cache.end())
            it = hom_cache.emplace(std::make_pair(a, b), all_iop_maps(NameSet(a), NameSet(b)))
                     .first;
        return it->second;
    }
    Map id(int a) const { return iop_identity(NameSet(a)); }
    Map compose(const Map& f, const Map& g) const { return iop_compose(f, g); }
    int dom(const Map& f) const { return f.dom.size; }
    int cod(const Map& f) const { return f.cod.size; }
    bool eq(const Map& f, const Map& g) const { return f == g; }
    bool independent(const Map& p, const Map& q, const Map& r, const Map& s) const {
        return iop_is_independent(IopSquare{p, q, r, s});
    }
    bool completion(const Map& r, const Map& s, Map& p, Map& q) const {
        auto sq = iop_independent_pullback(r, s);
        p = sq.p;
        q = sq.q;
        return true;
    }
    bool independent_pullback(const Map& p, const Map& q, const Map& r, const Map& s) const {
        return iop_is_independent_pullback(IopSquare{p, q, r, s});
    }
    std::string describe(const Map& f) const {
        std::string out = "[";
        for (size_t i = 0; i < f.emb.size(); ++i) {
            if (i) out += ",";
            out += std::to_string(f.emb[i]);
        }
        return out + "]<=" + std::to_string(f.dom.size);
    }
};

} // namespace

AxiomReport check_ip_axioms_nominal(int world_bound) {
    if (world_bound < 0) throw invalid_input("check_ip_axioms_nominal: negative world bound");
    IopSite site;
    return check_ip_axioms_on(site, world_bound);
}

NameTuple::NameTuple(NameSet world_, std::vector<int> entries_)
    : world(world_), entries(std::move(entries_)) {
    validate();
}

void NameTuple::validate() const {
    for (int e : entries)
        if (e < 0 || e >= world.size) throw invalid_input("name tuple: entry out of world");
}

bool operator==(const NameTuple& a, const NameTuple& b) {
    return a.world == b.world && a.entries == b.entries;
}
bool operator!=(const NameTuple& a, const NameTuple& b) { return !(a == b); }

NameTuple restrict_tuple(const NameTuple& t, const IopMap& f) {
    if (f.cod != t.world)
        throw invalid_input("restrict: map targets world of size " + std::to_string(f.cod.size) +
                            ", tuple lives at size " + std::to_string(t.world.size));
    std::vector<int> e(t.entries.size());
    for (size_t i = 0; i < t.entries.size(); ++i)
        e[i] = f.emb[static_cast<size_t>(t.entries[i])];
    return NameTuple(f.dom, std::move(e));
}

std::vector<int> support(const NameTuple& t) {
    std::vector<int> s = t.entries;
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

bool orbit_equiv(const NameTuple& t, const NameTuple& u) {
    if (t.world != u.world) throw invalid_input("orbit equivalence: worlds differ");
    if (t.entries.size() != u.entries.size())
        throw invalid_input("orbit equivalence: arities differ");
    const size_t n = t.entries.size();
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            if ((t.entries[i] == t.entries[j]) != (u.entries[i] == u.entries[j])) return false;
    return true;
}

bool cond_indep_tuples(const NameTuple& x, const NameTuple& y, const NameTuple& z) {
    if (x.world != y.world || x.world != z.world)
        throw invalid_input("independence: worlds differ");
    const auto sx = support(x), sy = support(y), sz = support(z);
    std::vector<int> meet;
    std::set_intersection(sx.begin(), sx.end(), sy.begin(), sy.end(), std::back_inserter(meet));
    return std::includes(sz.begin(), sz.end(), meet.begin(), meet.end());
}

NominalModel::Support NominalModel::support(const NameTuple& e) const {
    const auto names = sheaflogic::support(e);
    const NameSet obj(static_cast<int>(names.size()));
    std::vector<int> ranked(e.entries.size());
    for (size_t i = 0; i < e.entries.size(); ++i)
        ranked[i] = static_cast<int>(
            std::lower_bound(names.begin(), names.end(), e.entries[i]) - names.begin());
    return {obj, IopMap(e.world, obj, names), NameTuple(obj, std::move(ranked))};
}

NominalModel::Pairing NominalModel::pair_maps(const IopMap& f, const IopMap& g) const {
    if (f.dom != g.dom) throw invalid_input("pairing: span legs leave different worlds");
    std::vector<int> uni = f.emb;
    uni.insert(uni.end(), g.emb.begin(), g.emb.end());
    std::sort(uni.begin(), uni.end());
    uni.erase(std::unique(uni.begin(), uni.end()), uni.end());
    const NameSet obj(static_cast<int>(uni.size()));
    const auto rank = [&uni](int v) {
        return static_cast<int>(std::lower_bound(uni.begin(), uni.end(), v) - uni.begin());
    };
    std::vector<int> p1(f.emb.size()), q1(g.emb.size());
    for (size_t i = 0; i < f.emb.size(); ++i) p1[i] = rank(f.emb[i]);
    for (size_t i = 0; i < g.emb.size(); ++i) q1[i] = rank(g.emb[i]);
    return {obj, IopMap(f.dom, obj, std::move(uni)), IopMap(obj, f.cod, std::move(p1)),
            IopMap(obj, g.cod, std::move(q1))};
}

NameTuple NominalModel::pair_elems(const NameTuple& a, const NameTuple& b) const {
    if (a.world != b.world) throw invalid_input("pair: tuples live at different worlds");
    std::vector<int> e = a.entries;
    e.insert(e.end(), b.entries.begin(), b.entries.end());
    return NameTuple(a.world, std::move(e));
}

std::vector<NominalModel::Span> NominalModel::equiv_spans(const NameTuple& x,
                                                          const NameTuple& y) const {
    if (x.world != y.world) throw invalid_input("equivalence: worlds differ");
    if (x.entries.size() != y.entries.size())
        throw invalid_input("equivalence: arities differ");
    std::vector<Span> out;
    std::vector<int> perm(static_cast<size_t>(x.world.size));
    std::iota(perm.begin(), perm.end(), 0);
    const IopMap id = iop_identity(x.world);
    do
        out.push_back({IopMap(x.world, x.world, perm), id});
    while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

// ---------------------------------------------------------------------------
// Forcing over the nominal model
// ---------------------------------------------------------------------------

namespace {

void append_bytes(std::string& key, const void* p, size_t n) {
    key.append(static_cast<const char*>(p), n);
}

struct NomBindingEnt {
    std::string var;
    std::string sort;
    std::vector<int> entries; // world is tracked separately by the evaluator
};

class NomEvaluator {
public:
    NomEvaluator(const Signature& sig, bool memo) : sig_(sig), memo_on_(memo) {}

    bool run(const FormulaPtr& f, int world, std::vector<NomBindingEnt>& env) {
        switch (f->kind) {
        case FKind::Eq:
            return entries_of(env, f->xs[0]) == entries_of(env, f->xs[1]);
        case FKind::Rel:
            throw invalid_input("nominal evaluation: relation atoms need an enumerated sort");
        case FKind::Not:
            return !run(f->lhs, world, env);
        case FKind::And:
            return run(f->lhs, world, env) && run(f->rhs, world, env);
        case FKind::Or:
            return run(f->lhs, world, env) || run(f->rhs, world, env);
        case FKind::Implies:
            return !run(f->lhs, world, env) || run(f->rhs, world, env);
        case FKind::Equiv:
        case FKind::Indep:
        case FKind::Exists:
        case FKind::Forall:
            break;
        }

        std::string key;
        if (memo_on_) {
            key = memo_key(f, world, env);
            const auto it = memo_.find(key);
            if (it != memo_.end()) return it->second;
        }

        bool result = false;
        switch (f->kind) {
        case FKind::Equiv: {
            const NameTuple xs = tuple_of(env, f->xs, world);
            const NameTuple ys = tuple_of(env, f->ys, world);
            result = orbit_equiv(xs, ys);
            break;
        }
        case FKind::Indep: {
            const NameTuple xs = tuple_of(env, f->xs, world);
            const NameTuple ys = tuple_of(env, f->ys, world);
            const NameTuple zs = tuple_of(env, f->zs, world);
            result = cond_indep_tuples(xs, ys, zs);
            break;
        }
        case FKind::Exists:
            result = quantifier(f, world, env, true);
            break;
        case FKind::Forall:
            result = quantifier(f, world, env, false);
            break;
        default:
            throw invalid_input("nominal evaluation: unexpected formula node");
        }

        if (memo_on_ && memo_.size() < (1u << 22)) memo_.emplace(std::move(key), result);
        return result;
    }

private:
    const std::vector<int>& entries_of(const std::vector<NomBindingEnt>& env,
                                       const std::string& name) const {
        for (auto it = env.rbegin(); it != env.rend(); ++it)
            if (it->var == name) return it->entries;
        throw invalid_input("nominal evaluation: unbound variable '" + name + "'");
    }

    NameTuple tuple_of(const std::vector<NomBindingEnt>& env,
                       const std::vector<std::string>& names, int world) const {
        std::vector<int> entries;
        for (const auto& n : names) {
            const auto& e = entries_of(env, n);
            entries.insert(entries.end(), e.begin(), e.end());
        }
        return NameTuple(NameSet(world), std::move(entries));
    }

    int arity_of_sort(const std::string& sort_name) const {
        const SortDecl* sd = sig_.find_sort(sort_name);
        if (!sd) throw invalid_input("nominal evaluation: unknown sort '" + sort_name + "'");
        if (sd->kind != SortDecl::Kind::names)
            throw invalid_input("nominal evaluation: sort '" + sort_name +
                                "' is not a names sort");
        return sd->name_arity;
    }

    // Quantifiers range over worlds extending the current one by up to
    // arity-of-sort fresh names (inclusion maps), and all tuples there. Up to
    // a permutation of the extended world -- under which forcing is invariant
    // -- every witness map and element arises this way, so the enumeration is
    // exact, not a bounded approximation.
    bool quantifier(const FormulaPtr& f, int world, std::vector<NomBindingEnt>& env,
                    bool existential) {
        const int k = arity_of_sort(f->sort_name);
        for (int m = 0; m <= k; ++m) {
            const int w2 = world + m;
            std::vector<int> tup(static_cast<size_t>(k), 0);
            if (w2 == 0 && k > 0) continue; // no tuples over the empty world
            for (;;) {
                env.push_back({f->name, f->sort_name, tup});
                const bool got = run(f->lhs, w2, env);
                env.pop_back();
                if (got == existential) return existential;
                int pos = k - 1;
                while (pos >= 0 && tup[static_cast<size_t>(pos)] == w2 - 1) {
                    tup[static_cast<size_t>(pos)] = 0;
                    --pos;
                }
                if (pos < 0) break;
                ++tup[static_cast<size_t>(pos)];
            }
        }
        return !existential;
    }

    // Memo key: node identity, world size, and the free variables' joint
    // entry pattern with names renumbered in first-occurrence order. Two
    // assignments with the same pattern at the same world size differ by a
    // world permutation, and forcing is invariant under those.
    std::string memo_key(const FormulaPtr& f, int world,
                         const std::vector<NomBindingEnt>& env) {
        auto fit = fvs_.find(f.get());
        if (fit == fvs_.end()) fit = fvs_.emplace(f.get(), free_vars(*f)).first;

        std::string key;
        const Formula* ptr = f.get();
        append_bytes(key, &ptr, sizeof(ptr));
        append_bytes(key, &world, sizeof(world));
        std::vector<int> rename;
        for (const auto& v : fit->second) {
            const auto& entries = entries_of(env, v);
            const int arity = static_cast<int>(entries.size());
            append_bytes(key, &arity, sizeof(arity));
            for (int e : entries) {
                int canon = -1;
                for (size_t i = 0; i < rename.size(); ++i)
                    if (rename[i] == e) { canon = static_cast<int>(i); break; }
                if (canon < 0) {
                    canon = static_cast<int>(rename.size());
                    rename.push_back(e);
                }
                append_bytes(key, &canon, sizeof(canon));
            }
        }
        return key;
    }

    const Signature& sig_;
    bool memo_on_;
    std::unordered_map<std::string, bool> memo_;
    std::unordered_map<const Formula*, std::vector<std::string>> fvs_;
};

void validate_bindings(NameSet world, const std::vector<NominalBinding>& rho,
                       const Signature& sig) {
    for (size_t i = 0; i < rho.size(); ++i) {
        for (size_t j = i + 1; j < rho.size(); ++j)
            if (rho[i].var == rho[j].var)
                throw invalid_input("nominal evaluation: duplicate binding for '" + rho[i].var +
                                    "'");
        const SortDecl* sd = sig.find_sort(rho[i].sort);
        if (!sd) throw invalid_input("nominal evaluation: unknown sort '" + rho[i].sort + "'");
        if (sd->kind != SortDecl::Kind::names)
            throw invalid_input("nominal evaluation: sort '" + rho[i].sort +
                                "' is not a names sort");
        rho[i].value.validate();
        if (rho[i].value.world != world)
            throw invalid_input("nominal evaluation: binding for '" + rho[i].var +
                                "' lives at the wrong world");
        if (rho[i].value.arity() != sd->name_arity)
            throw invalid_input("nominal evaluation: binding for '" + rho[i].var +
                                "' has arity " + std::to_string(rho[i].value.arity()) +
                                ", sort expects " + std::to_string(sd->name_arity));
    }
}

} // namespace

bool eval_nominal(const FormulaPtr& f, NameSet world, const std::vector<NominalBinding>& rho,
                  const Signature& sig, bool memo) {
    if (!f) throw invalid_input("nominal evaluation: empty formula");
    validate_bindings(world, rho, sig);
    Context ctx;
    for (const auto& b : rho) ctx.push(b.var, b.sort);
    typecheck(*f, ctx, sig);
    std::vector<NomBindingEnt> env;
    env.reserve(rho.size());
    for (const auto& b : rho) env.push_back({b.var, b.sort, b.value.entries});
    NomEvaluator ev(sig, memo);
    return ev.run(f, world.size, env);
}

NominalVerdict valid_nominal(const FormulaPtr& f, const Context& free_ctx, const Signature& sig,
                             int world_bound) {
    if (!f) throw invalid_input("nominal validity: empty formula");
    if (world_bound < 0) throw invalid_input("nominal validity: negative world bound");
    typecheck(*f, free_ctx, sig);
    std::vector<int> arities;
    for (const auto& [var, sort] : free_ctx.vars) {
        const SortDecl* sd = sig.find_sort(sort);
        if (!sd) throw invalid_input("nominal validity: unknown sort '" + sort + "'");
        if (sd->kind != SortDecl::Kind::names)
            throw invalid_input("nominal validity: sort '" + sort + "' is not a names sort");
        arities.push_back(sd->name_arity);
    }

    NominalVerdict verdict;
    NomEvaluator ev(sig, true); // shared: the memo carries across assignments
    for (int w = 0; w <= world_bound; ++w) {
        const NameSet world(w);
        const size_t nv = free_ctx.vars.size();
        // Odometer over all assignments: each variable runs through the
        // w^arity tuples over the current world.
        std::vector<std::vector<int>> current(nv);
        bool any_empty = false;
        for (size_t i = 0; i < nv; ++i) {
            current[i].assign(static_cast<size_t>(arities[i]), 0);
            if (w == 0 && arities[i] > 0) any_empty = true;
        }
        if (any_empty) continue; // a sort has no elements at this world
        for (;;) {
            std::vector<NomBindingEnt> env;
            env.reserve(nv);
            for (size_t i = 0; i < nv; ++i)
                env.push_back(
                    {free_ctx.vars[i].first, free_ctx.vars[i].second, current[i]});
            ++verdict.cases;
            if (!ev.run(f, w, env)) {
                verdict.valid = false;
                verdict.world = w;
                for (size_t i = 0; i < nv; ++i)
                    verdict.counterexample.push_back({free_ctx.vars[i].first,
                                                      free_ctx.vars[i].second,
                                                      NameTuple(world, current[i])});
                return verdict;
            }
            // Advance the odometer, last variable fastest.
            size_t vi = nv;
            bool advanced = false;
            while (vi > 0 && !advanced) {
                --vi;
                auto& t = current[vi];
                int pos = arities[vi] - 1;
                while (pos >= 0 && t[static_cast<size_t>(pos)] == w - 1) {
                    t[static_cast<size_t>(pos)] = 0;
                    --pos;
                }
                if (pos >= 0) {
                    ++t[static_cast<size_t>(pos)];
                    advanced = true;
                }
            }
            if (!advanced) break;
        }
    }
    return verdict;
}

nlohmann::json to_json(const NameTuple& t) {
    return nlohmann::json{{"world", t.world.size}, {"entries", t.entries}};
}

NameTuple name_tuple_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("world") || !j.contains("entries"))
        throw invalid_input("name tuple: expected {\"world\": n, \"entries\": [..]}");
    if (!j["world"].is_number_integer() || !j["entries"].is_array())
        throw invalid_input("name tuple: malformed fields");
    std::vector<int> entries;
    for (const auto& e : j["entries"]) {
        if (!e.is_number_integer()) throw invalid_input("name tuple: entries must be integers");
        entries.push_back(e.get<int>());
    }
    return NameTuple(NameSet(j["world"].get<int>()), std::move(entries));
}

} // namespace sheaflogic
