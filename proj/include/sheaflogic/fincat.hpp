#pragma once

// The base category of finite nonempty sets and surjections, with its
// independent-pullback structure: commuting squares, weak-pullback tests,
// fibered-product completions, image factorisation and pairings, plus an
// exhaustive checker for the structural axioms (IP1-IP5, descent, and the
// pasting lemma for independent pullbacks).
//
// COMPOSITION ORDER: compose(f, g) is the diagrammatic composite g . f,
// i.e. f is applied first; it requires f.cod == g.dom. All commuting
// conditions in this file are stated with that convention.
//
// Carriers are canonical: the object of size n is {0, ..., n-1}. Labels are
// display-only and never participate in equality. Fibered products and
// images are enumerated in lexicographic / first-occurrence order so every
// construction is deterministic.

#include <optional>
#include <string>
#include <vector>

#include "sheaflogic/errors.hpp"

namespace sheaflogic {

struct FinSet {
    int size = 1;
    std::optional<std::vector<std::string>> labels;

    FinSet() = default;
    explicit FinSet(int n) : size(n) { validate(); }
    FinSet(int n, std::vector<std::string> lab) : size(n), labels(std::move(lab)) { validate(); }

    void validate() const;
    bool operator==(const FinSet& o) const { return size == o.size; }
    bool operator!=(const FinSet& o) const { return size != o.size; }
};

struct FinSurjection {
    FinSet dom;
    FinSet cod;
    std::vector<int> map; // map[i] in [0, cod.size)

    FinSurjection() = default;
    FinSurjection(FinSet d, FinSet c, std::vector<int> m)
        : dom(std::move(d)), cod(std::move(c)), map(std::move(m)) {
        validate();
    }

    void validate() const; // totality + surjectivity
    int operator()(int i) const { return map[static_cast<size_t>(i)]; }
    bool operator==(const FinSurjection& o) const {
        return dom == o.dom && cod == o.cod && map == o.map;
    }
};

FinSurjection identity(const FinSet& x);

// Diagrammatic composite g . f (f applied first); requires f.cod == g.dom.
FinSurjection compose(const FinSurjection& f, const FinSurjection& g);

// A commuting square
//
//        p
//    X ----> Y
//    |       |
//  q |       | r
//    v       v
//    Z ----> W
//        s
//
// with r.p = s.q. The apex is X; (p,q) is the span, (r,s) the cospan.
struct CommutingSquare {
    FinSurjection p; // X -> Y
    FinSurjection q; // X -> Z
    FinSurjection r; // Y -> W
    FinSurjection s; // Z -> W

    CommutingSquare() = default;
    CommutingSquare(FinSurjection p_, FinSurjection q_, FinSurjection r_, FinSurjection s_);
    void validate() const;
};

struct CoconfluenceResult {
    FinSet W;        // fibered product {(x,y) : p(x) = q(y)}, lexicographic
    FinSurjection u; // W -> X
    FinSurjection v; // W -> Y
};

// Complete the cospan p : X -> Z, q : Y -> Z to a commuting square by the
// fibered product in Set (the right Ore / coconfluence property).
CoconfluenceResult coconfluence_complete(const FinSurjection& p, const FinSurjection& q);

// Weak-pullback test: every (y,z) with r(y) = s(z) is covered by some apex
// element. This is the designated independence of squares.
bool is_independent_square(const CommutingSquare& sq);

// Completion of a cospan to its designated pullback: apex = fibered product.
CommutingSquare independent_pullback(const FinSurjection& r, const FinSurjection& s);

// Independent + the apex maps bijectively onto the fibered product of (r,s),
// i.e. the square is an actual pullback in Set. (The universal property is
// validated separately in the test suite by bounded enumeration.)
bool is_independent_pullback(const CommutingSquare& sq);

template <class T>
struct ImageFactorisation {
    FinSet mid;         // one point per distinct value, first-occurrence order
    FinSurjection surj; // dom -> mid
    std::vector<T> inj; // mid -> values, injective
};

// Surjection/injection factorisation of a total function given by its value
// array. The middle object enumerates distinct values in first-occurrence
// order, which makes the output canonical.
template <class T>
ImageFactorisation<T> image_factorise(const std::vector<T>& f, const FinSet& dom) {
    if (dom.size <= 0 || f.size() != static_cast<size_t>(dom.size))
        throw invalid_input("image_factorise: empty or mismatched domain");
    std::vector<T> values;
    std::vector<int> surj(f.size());
    for (size_t i = 0; i < f.size(); ++i) {
        int idx = -1;
        for (size_t j = 0; j < values.size(); ++j)
            if (values[j] == f[i]) { idx = static_cast<int>(j); break; }
        if (idx < 0) {
            idx = static_cast<int>(values.size());
            values.push_back(f[i]);
        }
        surj[i] = idx;
    }
    FinSet mid(static_cast<int>(values.size()));
    return {mid, FinSurjection(dom, mid, std::move(surj)), std::move(values)};
}

struct PairingResult {
    FinSet P;         // image of x |-> (p(x), q(x)), first-occurrence order
    FinSurjection e;  // X -> P
    FinSurjection p1; // P -> Y
    FinSurjection q1; // P -> Z
};

// Terminal pair factorisation of a span (p, q) out of X: the image
// factorisation of the pair map. p1.e = p and q1.e = q.
PairingResult pairing(const FinSurjection& p, const FinSurjection& q);

// All surjections dom -> cod (empty when dom.size < cod.size), enumerated in
// lexicographic order of their map arrays.
std::vector<FinSurjection> all_surjections(const FinSet& dom, const FinSet& cod);

// All total maps dom -> cod in lexicographic order.
std::vector<std::vector<int>> all_maps(int dom_size, int cod_size);

struct AxiomCheck {
    std::string name;
    bool pass = true;
    long long cases = 0;
    std::string counterexample; // empty when pass
};

struct AxiomReport {
    std::vector<AxiomCheck> checks;
    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

// Exhaustively verify IP1-IP5, descent, and the independent-pullback pasting
// lemma over all diagrams built from surjections between sets of size
// <= size_bound. Counterexamples (never expected) are reported, not thrown.
AxiomReport check_ip_axioms(int size_bound);

} // namespace sheaflogic
