#pragma once
// SPDX-License-Identifier: MIT
//
// Generic constructions on a model category: the atomic relations (tuple
// equivalence, conditional independence), independent copies, and supports of
// products, written against a small duck-typed model interface so the same
// algorithms run over every concrete instance.
//
// A model type M provides:
//
//   M::Obj, M::Map, M::Elem       objects, covering maps, elements (an Elem
//                                 knows which object it lives on)
//   elem_eq(a, b)                 equality of elements on the same object
//   restrict_elem(e, f)           precomposition: e on X, f : Y -> X, result
//                                 on Y
//   compose(f, g)                 diagram order, f first
//   support(e) -> {obj, map, elem}
//                                 terminal factorisation of e: elem on obj
//                                 with restrict_elem(elem, map) == e
//   pair_maps(f, g) -> {obj, e, p1, q1}
//                                 terminal pair factorisation of a span out
//                                 of a common domain: p1 . e == f, q1 . e == g
//   pair_elems(a, b)              the element (a, b) on the shared object
//   independent(p, q, r, s)       the designated independence of the
//                                 commuting square r . p == s . q
//   independent_pullback_square(r, s)
//                                 completion of a cospan to its designated
//                                 pullback; result exposes members p and q
//                                 (the span out of the new apex)
//   equiv_spans(x, y) -> iterable of {u, v}
//                                 canonical candidate spans (u, v) out of a
//                                 common object into the object of x and y;
//                                 complete for the equivalence search below
//
// Every construction verifies the element conditions it relies on and throws
// invalid_input on a violation: that signals a broken model instance, not bad
// user data.

#include <string>
#include <vector>

#include "sheaflogic/errors.hpp"
#include "sheaflogic/fincat.hpp"
#include "sheaflogic/multiteam.hpp"

namespace sheaflogic {

// ---------------------------------------------------------------------------
// Generic algorithms
// ---------------------------------------------------------------------------

// x ~ y: some span (u, v) out of a common object equalises x and y, i.e.
// restrict(x, u) == restrict(y, v). The model's canonical span enumerator
// must be complete: whenever any equalising span exists, one of the listed
// candidates works.
template <class M>
bool atomic_equiv(const M& m, const typename M::Elem& x, const typename M::Elem& y) {
    for (const auto& sp : m.equiv_spans(x, y))
        if (m.elem_eq(m.restrict_elem(x, sp.u), m.restrict_elem(y, sp.v))) return true;
    return false;
}

// x is independent of y given z: build the canonical candidate square and
// test it for independence.
//
//   (Z, t, z1)   support of z
//   (Zx, sx, x1) support of x, and likewise for y
//   X_x          pairing of (sx, t), with ex : X -> X_x and r : X_x -> Z
//   X_y          pairing of (sy, t), with ey : X -> X_y and s : X_y -> Z
//
// The square ex/ey over the cospan r/s commutes (both composites equal t),
// x and y descend to X_x resp. X_y, and t supports z -- so the square carries
// a conditional-independence diagram for (x, y, z) iff it is independent.
// Terminality of supports and pairings makes this single candidate complete.
template <class M>
bool atomic_cond_indep(const M& m, const typename M::Elem& x, const typename M::Elem& y,
                       const typename M::Elem& z) {
    const auto sz = m.support(z);
    const auto sx = m.support(x);
    const auto sy = m.support(y);
    const auto px = m.pair_maps(sx.map, sz.map);
    const auto py = m.pair_maps(sy.map, sz.map);

    // Element conditions: x and y descend to the pairing objects, and the
    // shared composite to Z restricts the support element back to z.
    const auto x1 = m.restrict_elem(sx.elem, px.p1);
    if (!m.elem_eq(m.restrict_elem(x1, px.e), x))
        throw invalid_input("cond-indep square: left leg does not factor x");
    const auto y1 = m.restrict_elem(sy.elem, py.p1);
    if (!m.elem_eq(m.restrict_elem(y1, py.e), y))
        throw invalid_input("cond-indep square: right leg does not factor y");
    if (!m.elem_eq(m.restrict_elem(sz.elem, m.compose(px.e, px.q1)), z))
        throw invalid_input("cond-indep square: diagonal does not restrict to z");

    return m.independent(px.e, py.e, px.q1, py.q1);
}

template <class M>
struct IndependentCopy {
    typename M::Map p;    // new object -> object of x and w
    typename M::Elem y;   // the copy, on the new object
};

// A copy y of x that is independent of everything over w: pull the support
// map of w back along itself (the designated pullback), take one projection
// as the covering map p and transport x along the other. Then (y, w.p) is
// equivalent to (x.p, w.p) and y is independent of any u.p given w.p.
template <class M>
IndependentCopy<M> independent_copy(const M& m, const typename M::Elem& x,
                                    const typename M::Elem& w) {
    const auto sw = m.support(w);
    const auto sq = m.independent_pullback_square(sw.map, sw.map);
    return {sq.p, m.restrict_elem(x, sq.q)};
}

template <class M>
struct SupportTriple {
    typename M::Obj obj;
    typename M::Map map;   // object of e -> obj
    typename M::Elem elem; // on obj, with restrict_elem(elem, map) == e
};

// Support of a pair (x, y) from the supports of the components: pair the two
// support maps. Terminality of the pairing gives terminality of the result.
template <class M>
SupportTriple<M> support_of_product(const M& m, const typename M::Elem& x,
                                    const typename M::Elem& y) {
    const auto sx = m.support(x);
    const auto sy = m.support(y);
    const auto pr = m.pair_maps(sx.map, sy.map);
    auto elem = m.pair_elems(m.restrict_elem(sx.elem, pr.p1), m.restrict_elem(sy.elem, pr.q1));
    if (!m.elem_eq(m.restrict_elem(elem, pr.e), m.pair_elems(x, y)))
        throw invalid_input("product support: paired element does not restrict to (x, y)");
    return {pr.obj, pr.e, std::move(elem)};
}

// ---------------------------------------------------------------------------
// The team-sheaf model over finite surjections
// ---------------------------------------------------------------------------

// An element of a finite product of variable sheaves on a sample set: zero or
// more columns sharing the sample. Zero columns is the (unique) element of
// the empty product.
struct TupleElem {
    FinSet sample{1};
    std::vector<NondetVar> cols;

    TupleElem() = default;
    TupleElem(FinSet sample_, std::vector<NondetVar> cols_);

    void validate() const;
    // Row of column values at sample point i.
    std::vector<int> row(int i) const;
};

bool operator==(const TupleElem& a, const TupleElem& b);
bool operator!=(const TupleElem& a, const TupleElem& b);

struct TupleModel {
    using Obj = FinSet;
    using Map = FinSurjection;
    using Elem = TupleElem;

    struct Span {
        FinSurjection u, v;
    };
    struct Pairing {
        FinSet obj;
        FinSurjection e, p1, q1;
    };
    struct Support {
        FinSet obj;
        FinSurjection map;
        TupleElem elem;
    };

    bool elem_eq(const TupleElem& a, const TupleElem& b) const { return a == b; }
    TupleElem restrict_elem(const TupleElem& e, const FinSurjection& f) const;
    FinSurjection compose(const FinSurjection& f, const FinSurjection& g) const {
        return sheaflogic::compose(f, g);
    }

    // Image factorisation of the joint row map, first-occurrence order.
    Support support(const TupleElem& e) const;

    Pairing pair_maps(const FinSurjection& f, const FinSurjection& g) const {
        const PairingResult pr = pairing(f, g);
        return {pr.P, pr.e, pr.p1, pr.q1};
    }
    TupleElem pair_elems(const TupleElem& a, const TupleElem& b) const;

    bool independent(const FinSurjection& p, const FinSurjection& q, const FinSurjection& r,
                     const FinSurjection& s) const {
        return is_independent_square(CommutingSquare(p, q, r, s));
    }
    CommutingSquare independent_pullback_square(const FinSurjection& r,
                                                const FinSurjection& s) const {
        return independent_pullback(r, s);
    }

    // Canonical equalising-span candidate: the maximal agreement relation
    // W := {(i, j) : row_x(i) == row_y(j)}, in lexicographic order. Any
    // equalising span factors elementwise through W, and a factor of a span
    // with surjective legs has surjective legs, so W works whenever anything
    // does. Returns one span (when both projections of W are onto) or none.
    std::vector<Span> equiv_spans(const TupleElem& x, const TupleElem& y) const;
};

// Second opinion for atomic_cond_indep over the team-sheaf model: enumerate
// every commuting square over the canonical support of z whose legs descend
// x and y, and ask whether any of them is independent. Exponential in the
// sample size; meant for cross-checking on small samples only.
bool cond_indep_by_search(const TupleModel& m, const TupleElem& x, const TupleElem& y,
                          const TupleElem& z);

} // namespace sheaflogic
