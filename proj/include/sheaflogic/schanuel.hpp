#pragma once
// SPDX-License-Identifier: MIT
//
// The nominal model: the opposite category of finite sets and injections,
// with name-tuple sheaves. Elements are tuples of names from a world;
// restriction pushes entries forward along an injection; supports are the
// occurring names. Equivalence of tuples is orbit equality (same equality
// pattern), and conditional independence reduces to a support-intersection
// check -- both are also reachable through the generic constructions via the
// NominalModel instance below, which the tests exploit as a second route.
//
// Independence of a commuting square here means the associated square of
// injections is a pullback in Set; independent pullbacks additionally cover
// the apex, and a cospan completes to one by the pushout in Set of the
// associated span of injections.

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "sheaflogic/fincat.hpp"
#include "sheaflogic/formula.hpp"

namespace sheaflogic {

// A finite set of names 0..size-1; may be empty.
struct NameSet {
    int size = 0;

    NameSet() = default;
    explicit NameSet(int n);
};

bool operator==(const NameSet& a, const NameSet& b);
bool operator!=(const NameSet& a, const NameSet& b);

// A map dom -> cod in the opposite category of injections: the data is an
// injection of cod into dom (emb[b] is where name b of cod lands in dom).
struct IopMap {
    NameSet dom, cod;
    std::vector<int> emb; // cod.size distinct values in [0, dom.size)

    IopMap() = default;
    IopMap(NameSet dom_, NameSet cod_, std::vector<int> emb_);
    void validate() const;
};

bool operator==(const IopMap& a, const IopMap& b);
bool operator!=(const IopMap& a, const IopMap& b);

IopMap iop_identity(NameSet x);
// Diagram order: f : A -> B, then g : B -> C.
IopMap iop_compose(const IopMap& f, const IopMap& g);
// The canonical inclusion world -> base (base.size <= world.size), whose
// data embeds base into world identically.
IopMap iop_inclusion(NameSet world, NameSet base);
// All maps dom -> cod, i.e. all injections of cod into dom, in lexicographic
// order of their embedding arrays.
std::vector<IopMap> all_iop_maps(NameSet dom, NameSet cod);

// Same orientation as the surjection category: span (p : X->Y, q : X->Z),
// cospan (r : Y->W, s : Z->W), commuting r.p = s.q.
struct IopSquare {
    IopMap p, q, r, s;

    void validate() const;
};

// The associated square of injections is a pullback in Set: every pair
// (y, z) with the same image in the apex comes from a name of W.
bool iop_is_independent(const IopSquare& sq);
// Independent and the two embeddings cover the apex (the injection square is
// a pushout in Set).
bool iop_is_independent_pullback(const IopSquare& sq);
// Complete a cospan to its independent pullback: pushout in Set of the
// associated span of injections, names of Y first, unmatched names of Z after.
IopSquare iop_independent_pullback(const IopMap& r, const IopMap& s);

// Exhaustive run of the independent-pullback axioms over worlds of size
// <= world_bound (the empty world included).
AxiomReport check_ip_axioms_nominal(int world_bound);

// A tuple of names from a world; repeats allowed, arity may be zero.
struct NameTuple {
    NameSet world;
    std::vector<int> entries;

    NameTuple() = default;
    NameTuple(NameSet world_, std::vector<int> entries_);
    void validate() const;
    int arity() const { return static_cast<int>(entries.size()); }
};

bool operator==(const NameTuple& a, const NameTuple& b);
bool operator!=(const NameTuple& a, const NameTuple& b);

// t at X along f : Y -> X gives a tuple at Y: entries pushed through the
// embedding of X into Y.
NameTuple restrict_tuple(const NameTuple& t, const IopMap& f);

// The names occurring in t, ascending.
std::vector<int> support(const NameTuple& t);

// Same equality pattern: positions share a name in t iff they do in u;
// equivalently some permutation of the world maps t to u. Worlds and arities
// must agree.
bool orbit_equiv(const NameTuple& t, const NameTuple& u);

// supp(x) and supp(y) only meet inside supp(z). Worlds must agree.
bool cond_indep_tuples(const NameTuple& x, const NameTuple& y, const NameTuple& z);

// The model-interface instance over name tuples, for the generic
// constructions (atomic_equiv, atomic_cond_indep, independent copies,
// supports of products).
struct NominalModel {
    using Obj = NameSet;
    using Map = IopMap;
    using Elem = NameTuple;

    struct Span {
        IopMap u, v;
    };
    struct Pairing {
        NameSet obj;
        IopMap e, p1, q1;
    };
    struct Support {
        NameSet obj;
        IopMap map;
        NameTuple elem;
    };

    bool elem_eq(const NameTuple& a, const NameTuple& b) const { return a == b; }
    NameTuple restrict_elem(const NameTuple& e, const IopMap& f) const {
        return restrict_tuple(e, f);
    }
    IopMap compose(const IopMap& f, const IopMap& g) const { return iop_compose(f, g); }

    // Occurring names in ascending order, entries renumbered by rank.
    Support support(const NameTuple& e) const;

    // Pairing of a span out of X: pushout of the pullback of the associated
    // cospan of injections, i.e. the union of the two images as a subset of
    // X in ascending order.
    Pairing pair_maps(const IopMap& f, const IopMap& g) const;
    // Concatenation on a shared world.
    NameTuple pair_elems(const NameTuple& a, const NameTuple& b) const;

    bool independent(const IopMap& p, const IopMap& q, const IopMap& r, const IopMap& s) const {
        return iop_is_independent(IopSquare{p, q, r, s});
    }
    IopSquare independent_pullback_square(const IopMap& r, const IopMap& s) const {
        return iop_independent_pullback(r, s);
    }

    // Candidate spans (i, id) over all world permutations i: tuples are
    // equivalent here exactly when an endomap of the world carries one to
    // the other, and endo-injections of a finite world are its permutations.
    std::vector<Span> equiv_spans(const NameTuple& x, const NameTuple& y) const;
};

// ---------------------------------------------------------------------------
// Forcing over the nominal model
// ---------------------------------------------------------------------------

struct NominalBinding {
    std::string var;
    std::string sort; // a names-sort of the signature
    NameTuple value;  // arity equal to the sort's
};

// Forcing at a world: classical connectives, atoms by orbit equality /
// support intersection / entrywise equality, quantifiers over worlds
// extending the current one by at most arity-of-sort fresh names (complete
// up to permutation of fresh names, so the verdict is exact). Memoisation
// canonicalises bindings up to world permutation; pass memo = false to force
// plain recursion.
bool eval_nominal(const FormulaPtr& f, NameSet world, const std::vector<NominalBinding>& rho,
                  const Signature& sig, bool memo = true);

struct NominalVerdict {
    bool valid = true;
    long long cases = 0; // assignments evaluated
    int world = -1;      // counterexample world, -1 when valid
    std::vector<NominalBinding> counterexample;
};

// Forcing at every world of size <= world_bound under every assignment of
// the free variables to tuples there.
NominalVerdict valid_nominal(const FormulaPtr& f, const Context& free_ctx, const Signature& sig,
                             int world_bound = 3);

// JSON round-trip: {"world": n, "entries": [..]}.
nlohmann::json to_json(const NameTuple& t);
NameTuple name_tuple_from_json(const nlohmann::json& j);

} // namespace sheaflogic
