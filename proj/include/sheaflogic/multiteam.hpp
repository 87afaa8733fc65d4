#pragma once

// Nondeterministic variables over finite sample sets: the presheaf that sends
// a sample set Omega to the functions Omega -> A for a fixed value sort A,
// with restriction along surjections given by precomposition. Provides the
// sheaf operations (invariance, descent), the relations studied on top of it
// (equiextension, conditional independence, box/diamond membership), supports
// via image factorisation, and exhaustive closure checks showing each
// relation cuts out a subsheaf.

#include <memory>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "sheaflogic/fincat.hpp"

namespace sheaflogic {

struct SortValueSet {
    std::string name;
    std::vector<std::string> atoms; // nonempty, pairwise distinct

    SortValueSet() = default;
    SortValueSet(std::string n, std::vector<std::string> a);

    void validate() const;
    int size() const { return static_cast<int>(atoms.size()); }
    // Index of an atom, or -1 when absent.
    int index_of(const std::string& atom) const;
    bool operator==(const SortValueSet& o) const { return name == o.name && atoms == o.atoms; }
    bool operator!=(const SortValueSet& o) const { return !(*this == o); }
};

using SortPtr = std::shared_ptr<const SortValueSet>;

// A function from a sample set into a sort, stored as indices into the
// sort's atom list. Not required to be surjective onto the sort.
struct NondetVar {
    FinSet sample;
    SortPtr sort;
    std::vector<int> values; // atom indices, length = sample.size

    NondetVar() = default;
    NondetVar(FinSet s, SortPtr so, std::vector<int> vals);

    void validate() const;
    int operator()(int omega) const { return values[static_cast<size_t>(omega)]; }
    const std::string& atom_at(int omega) const {
        return sort->atoms[static_cast<size_t>(values[static_cast<size_t>(omega)])];
    }
    // Distinct value indices in first-occurrence order.
    std::vector<int> image() const;
    bool operator==(const NondetVar& o) const {
        return sample == o.sample && *sort == *o.sort && values == o.values;
    }
};

// Precomposition x . c along c : Omega' -> Omega.
NondetVar restrict_var(const NondetVar& x, const FinSurjection& c);

// True iff y is constant on every fiber of c, i.e. y descends along c.
bool is_invariant(const NondetVar& y, const FinSurjection& c);

// The unique x on c's codomain with restrict_var(x, c) = y.
// Throws not_invariant when no such x exists.
NondetVar descend(const NondetVar& y, const FinSurjection& c);

// Equal images (as subsets of the shared sort).
bool equiextensive(const NondetVar& x, const NondetVar& y);

// Conditional independence of x and y given z over a shared sample set:
// every value pair (a,c) realized by (x,z) combines with every (b,c)
// realized by (y,z) into a jointly realized triple (a,b,c).
bool cond_indep(const NondetVar& x, const NondetVar& y, const NondetVar& z);

// All entries of x lie in the atom subset p / some entry lies in p.
bool box_member(const NondetVar& x, const std::vector<std::string>& p);
bool diamond_member(const NondetVar& x, const std::vector<std::string>& p);

struct SupportResult {
    FinSet sample_s;   // supporting sample set
    FinSurjection p;   // Omega -> sample_s
    NondetVar xs;      // injective variable on sample_s with xs . p = x
};

// Canonical support: image factorisation of x in first-occurrence order.
SupportResult support(const NondetVar& x);

enum class SubsheafRelation { equiextension, cond_indep, box, diamond };

const char* to_string(SubsheafRelation rel);

// Exhaustively verify, over sample sets and sorts of size <= bound, that the
// relation is closed under restriction and reflected along surjective
// restriction (the two conditions for cutting out a subsheaf).
AxiomReport check_subsheaf_closure(SubsheafRelation rel, int bound);

// JSON round-trip: {"sample": n, "sort": "A", "values": [...]}.
nlohmann::json to_json(const NondetVar& x);
NondetVar nondet_var_from_json(const nlohmann::json& j,
                               const std::vector<SortPtr>& known_sorts);

} // namespace sheaflogic
