// SPDX-License-Identifier: MIT

#include "sheaflogic/generic.hpp"

#include <algorithm>

namespace sheaflogic {

TupleElem::TupleElem(FinSet sample_, std::vector<NondetVar> cols_)
    : sample(sample_), cols(std::move(cols_)) {
    validate();
}

void TupleElem::validate() const {
    if (sample.size <= 0) throw invalid_input("tuple element: empty sample set");
    for (const auto& c : cols) {
        c.validate();
        if (c.sample != sample)
            throw invalid_input("tuple element: column lives on sample of size " +
                                std::to_string(c.sample.size) + ", expected " +
                                std::to_string(sample.size));
    }
}

std::vector<int> TupleElem::row(int i) const {
    if (i < 0 || i >= sample.size) throw invalid_input("tuple element: row index out of range");
    std::vector<int> out;
    out.reserve(cols.size());
    for (const auto& c : cols) out.push_back(c(i));
    return out;
}

bool operator==(const TupleElem& a, const TupleElem& b) {
    if (a.sample != b.sample || a.cols.size() != b.cols.size()) return false;
    for (size_t k = 0; k < a.cols.size(); ++k) {
        if (!(*a.cols[k].sort == *b.cols[k].sort)) return false;
        if (a.cols[k].values != b.cols[k].values) return false;
    }
    return true;
}

bool operator!=(const TupleElem& a, const TupleElem& b) { return !(a == b); }

TupleElem TupleModel::restrict_elem(const TupleElem& e, const FinSurjection& f) const {
    if (f.cod != e.sample)
        throw invalid_input("restrict: map targets sample of size " + std::to_string(f.cod.size) +
                            ", element lives on size " + std::to_string(e.sample.size));
    std::vector<NondetVar> cols;
    cols.reserve(e.cols.size());
    for (const auto& c : e.cols) cols.push_back(restrict_var(c, f));
    return TupleElem(f.dom, std::move(cols));
}

TupleModel::Support TupleModel::support(const TupleElem& e) const {
    e.validate();
    std::vector<std::vector<int>> rows;
    rows.reserve(static_cast<size_t>(e.sample.size));
    for (int i = 0; i < e.sample.size; ++i) rows.push_back(e.row(i));
    const auto fact = image_factorise(rows, e.sample);
    std::vector<NondetVar> cols;
    cols.reserve(e.cols.size());
    for (size_t k = 0; k < e.cols.size(); ++k) {
        std::vector<int> vals(fact.inj.size());
        for (size_t j = 0; j < fact.inj.size(); ++j) vals[j] = fact.inj[j][k];
        cols.emplace_back(fact.mid, e.cols[k].sort, std::move(vals));
    }
    return {fact.mid, fact.surj, TupleElem(fact.mid, std::move(cols))};
}

TupleElem TupleModel::pair_elems(const TupleElem& a, const TupleElem& b) const {
    if (a.sample != b.sample)
        throw invalid_input("pair: elements live on sample sets of size " +
                            std::to_string(a.sample.size) + " and " +
                            std::to_string(b.sample.size));
    std::vector<NondetVar> cols = a.cols;
    cols.insert(cols.end(), b.cols.begin(), b.cols.end());
    return TupleElem(a.sample, std::move(cols));
}

std::vector<TupleModel::Span> TupleModel::equiv_spans(const TupleElem& x,
                                                      const TupleElem& y) const {
    x.validate();
    y.validate();
    if (x.sample != y.sample || x.cols.size() != y.cols.size())
        throw invalid_input("equivalence: elements live on different objects");
    for (size_t k = 0; k < x.cols.size(); ++k)
        if (!(*x.cols[k].sort == *y.cols[k].sort))
            throw invalid_input("equivalence: column sorts disagree");

    const int n = x.sample.size;
    std::vector<int> u, v;
    std::vector<char> hit_x(static_cast<size_t>(n), 0), hit_y(static_cast<size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
        const auto rx = x.row(i);
        for (int j = 0; j < n; ++j)
            if (rx == y.row(j)) {
                u.push_back(i);
                v.push_back(j);
                hit_x[static_cast<size_t>(i)] = 1;
                hit_y[static_cast<size_t>(j)] = 1;
            }
    }
    if (std::find(hit_x.begin(), hit_x.end(), 0) != hit_x.end() ||
        std::find(hit_y.begin(), hit_y.end(), 0) != hit_y.end())
        return {};
    const FinSet W(static_cast<int>(u.size()));
    return {Span{FinSurjection(W, x.sample, std::move(u)),
                 FinSurjection(W, y.sample, std::move(v))}};
}

namespace {

// vals (indexed by c's domain) is constant on every fiber of c.
bool constant_on_fibers(const std::vector<int>& vals, const FinSurjection& c) {
    std::vector<int> seen(static_cast<size_t>(c.cod.size), -1);
    for (int i = 0; i < c.dom.size; ++i) {
        int& v = seen[static_cast<size_t>(c(i))];
        if (v == -1)
            v = vals[static_cast<size_t>(i)];
        else if (v != vals[static_cast<size_t>(i)])
            return false;
    }
    return true;
}

// The unique r with r . c == t, given that t is constant on c's fibers.
FinSurjection descend_map(const FinSurjection& t, const FinSurjection& c) {
    std::vector<int> vals(static_cast<size_t>(c.cod.size), -1);
    for (int i = 0; i < c.dom.size; ++i) vals[static_cast<size_t>(c(i))] = t(i);
    return FinSurjection(c.cod, t.cod, std::move(vals));
}

// Every column of e is constant on the fibers of c.
bool descends(const TupleElem& e, const FinSurjection& c) {
    for (const auto& col : e.cols)
        if (!constant_on_fibers(col.values, c)) return false;
    return true;
}

} // namespace

bool cond_indep_by_search(const TupleModel& m, const TupleElem& x, const TupleElem& y,
                          const TupleElem& z) {
    x.validate();
    y.validate();
    z.validate();
    if (x.sample != y.sample || x.sample != z.sample)
        throw invalid_input("independence: elements live on different sample sets");

    const auto sz = m.support(z);
    const FinSet dom = x.sample;

    // Candidate left legs p : dom -> [k] under which both x and the support
    // map of z descend; the induced map r with r . p == sz.map is then
    // uniquely determined, and likewise on the right. Every independence
    // diagram over the canonical support arises this way up to isomorphism
    // of the two middle objects, and independence is iso-invariant.
    std::vector<FinSurjection> lefts, rights;
    for (int k = 1; k <= dom.size; ++k)
        for (const auto& c : all_surjections(dom, FinSet(k))) {
            if (!constant_on_fibers(sz.map.map, c)) continue;
            if (descends(x, c)) lefts.push_back(c);
            if (descends(y, c)) rights.push_back(c);
        }

    for (const auto& p : lefts) {
        const FinSurjection r = descend_map(sz.map, p);
        for (const auto& q : rights) {
            const FinSurjection s = descend_map(sz.map, q);
            if (is_independent_square(CommutingSquare(p, q, r, s))) return true;
        }
    }
    return false;
}

} // namespace sheaflogic
