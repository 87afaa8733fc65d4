#include "sheaflogic/fincat.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

#include "sheaflogic/errors.hpp"
#include "sheaflogic/ip_axioms.hpp"

namespace sheaflogic {

void FinSet::validate() const {
    if (size < 1) throw invalid_input("FinSet: size must be >= 1, got " + std::to_string(size));
    if (labels) {
        if (static_cast<int>(labels->size()) != size)
            throw invalid_input("FinSet: " + std::to_string(labels->size()) + " labels for size " +
                                std::to_string(size));
        std::set<std::string> seen(labels->begin(), labels->end());
        if (static_cast<int>(seen.size()) != size)
            throw invalid_input("FinSet: labels must be distinct");
    }
}

void FinSurjection::validate() const {
    dom.validate();
    cod.validate();
    if (static_cast<int>(map.size()) != dom.size)
        throw invalid_input("FinSurjection: map has " + std::to_string(map.size()) +
                            " entries for domain of size " + std::to_string(dom.size));
    std::vector<char> hit(static_cast<size_t>(cod.size), 0);
    for (int v : map) {
        if (v < 0 || v >= cod.size)
            throw invalid_input("FinSurjection: value " + std::to_string(v) +
                                " outside codomain of size " + std::to_string(cod.size));
        hit[static_cast<size_t>(v)] = 1;
    }
    for (int j = 0; j < cod.size; ++j)
        if (!hit[static_cast<size_t>(j)])
            throw invalid_input("FinSurjection: not surjective, codomain element " +
                                std::to_string(j) + " is not hit");
}

FinSurjection identity(const FinSet& x) {
    std::vector<int> m(static_cast<size_t>(x.size));
    for (int i = 0; i < x.size; ++i) m[static_cast<size_t>(i)] = i;
    return FinSurjection(x, x, std::move(m));
}

FinSurjection compose(const FinSurjection& f, const FinSurjection& g) {
    if (f.cod != g.dom)
        throw invalid_input("compose: codomain of first map (size " + std::to_string(f.cod.size) +
                            ") != domain of second (size " + std::to_string(g.dom.size) + ")");
    std::vector<int> m(f.map.size());
    for (size_t i = 0; i < f.map.size(); ++i) m[i] = g.map[static_cast<size_t>(f.map[i])];
    return FinSurjection(f.dom, g.cod, std::move(m));
}

CommutingSquare::CommutingSquare(FinSurjection p_, FinSurjection q_, FinSurjection r_,
                                 FinSurjection s_)
    : p(std::move(p_)), q(std::move(q_)), r(std::move(r_)), s(std::move(s_)) {
    validate();
}

void CommutingSquare::validate() const {
    if (p.dom != q.dom) throw invalid_input("square: span legs have different apexes");
    if (p.cod != r.dom) throw invalid_input("square: p and r do not compose");
    if (q.cod != s.dom) throw invalid_input("square: q and s do not compose");
    if (r.cod != s.cod) throw invalid_input("square: cospan legs have different targets");
    for (int x = 0; x < p.dom.size; ++x)
        if (r(p(x)) != s(q(x)))
            throw invalid_input("square does not commute at apex element " + std::to_string(x));
}

CoconfluenceResult coconfluence_complete(const FinSurjection& p, const FinSurjection& q) {
    if (p.cod != q.cod)
        throw invalid_input("coconfluence_complete: maps must share a codomain");
    std::vector<int> to_x, to_y;
    for (int x = 0; x < p.dom.size; ++x)
        for (int y = 0; y < q.dom.size; ++y)
            if (p(x) == q(y)) {
                to_x.push_back(x);
                to_y.push_back(y);
            }
    // Nonempty because p and q are surjections onto a common nonempty set,
    // and both projections are surjective: every x is paired with some y in
    // the fiber of q over p(x), and symmetrically.
    CoconfluenceResult res;
    res.W = FinSet(static_cast<int>(to_x.size()));
    res.u = FinSurjection(res.W, p.dom, std::move(to_x));
    res.v = FinSurjection(res.W, q.dom, std::move(to_y));
    return res;
}

namespace {

bool independent_maps(const FinSurjection& p, const FinSurjection& q, const FinSurjection& r,
                      const FinSurjection& s) {
    for (int y = 0; y < r.dom.size; ++y)
        for (int z = 0; z < s.dom.size; ++z) {
            if (r(y) != s(z)) continue;
            bool covered = false;
            for (int x = 0; x < p.dom.size && !covered; ++x)
                covered = (p(x) == y && q(x) == z);
            if (!covered) return false;
        }
    return true;
}

bool independent_pullback_maps(const FinSurjection& p, const FinSurjection& q,
                               const FinSurjection& r, const FinSurjection& s) {
    if (!independent_maps(p, q, r, s)) return false;
    // Jointly injective apex of the right size = bijective onto the fibered
    // product, i.e. a pullback in Set.
    std::set<std::pair<int, int>> pairs;
    for (int x = 0; x < p.dom.size; ++x)
        if (!pairs.insert({p(x), q(x)}).second) return false;
    long long fp = 0;
    for (int y = 0; y < r.dom.size; ++y)
        for (int z = 0; z < s.dom.size; ++z)
            if (r(y) == s(z)) ++fp;
    return fp == static_cast<long long>(p.dom.size);
}

} // namespace

bool is_independent_square(const CommutingSquare& sq) {
    return independent_maps(sq.p, sq.q, sq.r, sq.s);
}

CommutingSquare independent_pullback(const FinSurjection& r, const FinSurjection& s) {
    if (r.cod != s.cod)
        throw invalid_input("independent_pullback: cospan legs must share a codomain");
    auto cc = coconfluence_complete(r, s);
    return CommutingSquare(cc.u, cc.v, r, s);
}

bool is_independent_pullback(const CommutingSquare& sq) {
    return independent_pullback_maps(sq.p, sq.q, sq.r, sq.s);
}

PairingResult pairing(const FinSurjection& p, const FinSurjection& q) {
    if (p.dom != q.dom) throw invalid_input("pairing: maps must share a domain");
    std::vector<std::pair<int, int>> pair_map(static_cast<size_t>(p.dom.size));
    for (int x = 0; x < p.dom.size; ++x) pair_map[static_cast<size_t>(x)] = {p(x), q(x)};
    auto fact = image_factorise(pair_map, p.dom);
    std::vector<int> m1, m2;
    m1.reserve(fact.inj.size());
    m2.reserve(fact.inj.size());
    for (const auto& [a, b] : fact.inj) {
        m1.push_back(a);
        m2.push_back(b);
    }
    PairingResult res;
    res.P = fact.mid;
    res.e = fact.surj;
    res.p1 = FinSurjection(fact.mid, p.cod, std::move(m1));
    res.q1 = FinSurjection(fact.mid, q.cod, std::move(m2));
    return res;
}

std::vector<std::vector<int>> all_maps(int dom_size, int cod_size) {
    std::vector<std::vector<int>> out;
    if (dom_size < 0 || cod_size <= 0) return out;
    std::vector<int> cur(static_cast<size_t>(dom_size), 0);
    while (true) {
        out.push_back(cur);
        int i = dom_size - 1;
        while (i >= 0 && cur[static_cast<size_t>(i)] == cod_size - 1) {
            cur[static_cast<size_t>(i)] = 0;
            --i;
        }
        if (i < 0) break;
        ++cur[static_cast<size_t>(i)];
    }
    return out;
}

std::vector<FinSurjection> all_surjections(const FinSet& dom, const FinSet& cod) {
    std::vector<FinSurjection> out;
    if (dom.size < cod.size) return out;
    for (auto& m : all_maps(dom.size, cod.size)) {
        std::vector<char> hit(static_cast<size_t>(cod.size), 0);
        for (int v : m) hit[static_cast<size_t>(v)] = 1;
        if (std::all_of(hit.begin(), hit.end(), [](char c) { return c != 0; }))
            out.push_back(FinSurjection(dom, cod, std::move(m)));
    }
    return out;
}

namespace {

// Site adapter plugging the surjection category into the generic checker.
struct SurSite {
    using Map = FinSurjection;

    mutable std::map<std::pair<int, int>, std::vector<Map>> hom_cache;

    std::vector<int> objects(int bound) const {
        std::vector<int> out;
        for (int n = 1; n <= bound; ++n) out.push_back(n);
        return out;
    }
    const std::vector<Map>& hom(int a, int b) const {
        auto it = hom_cache.find({a, b});
        if (it == hom_cache.end())
            it = hom_cache.emplace(std::make_pair(a, b), all_surjections(FinSet(a), FinSet(b)))
                     .first;
        return it->second;
    }
    Map id(int a) const { return identity(FinSet(a)); }
    Map compose(const Map& f, const Map& g) const { return sheaflogic::compose(f, g); }
    int dom(const Map& f) const { return f.dom.size; }
    int cod(const Map& f) const { return f.cod.size; }
    bool eq(const Map& f, const Map& g) const { return f == g; }
    bool independent(const Map& p, const Map& q, const Map& r, const Map& s) const {
        return independent_maps(p, q, r, s);
    }
    bool completion(const Map& r, const Map& s, Map& p, Map& q) const {
        auto cc = coconfluence_complete(r, s);
        p = cc.u;
        q = cc.v;
        return true;
    }
    bool independent_pullback(const Map& p, const Map& q, const Map& r, const Map& s) const {
        return independent_pullback_maps(p, q, r, s);
    }
    std::string describe(const Map& f) const {
        std::string out = "[";
        for (size_t i = 0; i < f.map.size(); ++i) {
            if (i) out += ",";
            out += std::to_string(f.map[i]);
        }
        return out + "]";
    }
};

} // namespace

AxiomReport check_ip_axioms(int size_bound) {
    if (size_bound < 1) throw invalid_input("check_ip_axioms: size bound must be >= 1");
    SurSite site;
    return check_ip_axioms_on(site, size_bound);
}

} // namespace sheaflogic
