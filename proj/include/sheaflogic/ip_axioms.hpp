#pragma once

// Generic exhaustive checker for the independent-pullback axioms, written
// against a small "site" interface so the same checks run over the category
// of finite surjections and over the opposite category of finite injections.
//
// A site provides:
//   using Map = ...;                                   value type of arrows
//   std::vector<int> objects(int bound) const;         object ids to enumerate
//   std::vector<Map> hom(int a, int b) const;          arrows a -> b
//   Map id(int a) const;
//   Map compose(const Map& f, const Map& g) const;     g . f (f first)
//   int dom(const Map&) const;  int cod(const Map&) const;
//   bool eq(const Map&, const Map&) const;
//   bool independent(p, q, r, s) const;                designated squares
//   bool completion(const Map& r, const Map& s, Map& p, Map& q) const;
//   bool independent_pullback(p, q, r, s) const;
//   std::string describe(const Map&) const;
//
// Squares are oriented as in fincat.hpp: span (p : X->Y, q : X->Z), cospan
// (r : Y->W, s : Z->W), commuting r.p = s.q.

#include <string>
#include <vector>

#include "sheaflogic/fincat.hpp"

namespace sheaflogic {

namespace detail {

template <class Site>
std::string describe_square(const Site& site, const typename Site::Map& p,
                            const typename Site::Map& q, const typename Site::Map& r,
                            const typename Site::Map& s) {
    return "p=" + site.describe(p) + " q=" + site.describe(q) + " r=" + site.describe(r) +
           " s=" + site.describe(s);
}

} // namespace detail

template <class Site>
struct SquareList {
    using Map = typename Site::Map;
    struct Square {
        Map p, q, r, s;
    };
    std::vector<Square> squares;

    // All commuting squares over the site's objects.
    static SquareList enumerate(const Site& site, int bound) {
        SquareList out;
        auto objs = site.objects(bound);
        for (int x : objs)
            for (int y : objs)
                for (int z : objs)
                    for (int w : objs)
                        for (const auto& p : site.hom(x, y))
                            for (const auto& q : site.hom(x, z))
                                for (const auto& r : site.hom(y, w))
                                    for (const auto& s : site.hom(z, w))
                                        if (site.eq(site.compose(p, r), site.compose(q, s)))
                                            out.squares.push_back({p, q, r, s});
        return out;
    }
};

// IP1: every square whose right or bottom edge is an identity is independent.
template <class Site>
AxiomCheck check_ip1(const Site& site, int bound) {
    AxiomCheck c{"IP1", true, 0, ""};
    auto objs = site.objects(bound);
    for (int x : objs)
        for (int y : objs)
            for (int z : objs) {
                for (const auto& p : site.hom(x, y))
                    for (const auto& q : site.hom(x, z))
                        for (const auto& s : site.hom(z, y)) {
                            if (!site.eq(site.compose(q, s), p)) continue; // r = id_Y case
                            ++c.cases;
                            if (!site.independent(p, q, site.id(y), s)) {
                                c.pass = false;
                                c.counterexample = detail::describe_square(site, p, q, site.id(y), s);
                                return c;
                            }
                        }
                for (const auto& p : site.hom(x, y))
                    for (const auto& q : site.hom(x, z))
                        for (const auto& r : site.hom(y, z)) {
                            if (!site.eq(site.compose(p, r), q)) continue; // s = id_Z case
                            ++c.cases;
                            if (!site.independent(p, q, r, site.id(z))) {
                                c.pass = false;
                                c.counterexample = detail::describe_square(site, p, q, r, site.id(z));
                                return c;
                            }
                        }
            }
    return c;
}

// IP2: independence is symmetric in the two legs of the span/cospan.
template <class Site>
AxiomCheck check_ip2(const Site& site, const SquareList<Site>& all) {
    AxiomCheck c{"IP2", true, 0, ""};
    for (const auto& sq : all.squares) {
        if (!site.independent(sq.p, sq.q, sq.r, sq.s)) continue;
        ++c.cases;
        if (!site.independent(sq.q, sq.p, sq.s, sq.r)) {
            c.pass = false;
            c.counterexample = detail::describe_square(site, sq.p, sq.q, sq.r, sq.s);
            return c;
        }
    }
    return c;
}

// Enumerate, for a square A, all squares B pastable on its right edge:
// B's span is (p2 : Y -> Y2, A.r : Y -> W), B's cospan (r2 : Y2 -> W2,
// s2 : W -> W2). Calls fn(p2, r2, s2) for every commuting choice.
template <class Site, class Fn>
void for_pastable(const Site& site, int bound, const typename Site::Map& r_edge, Fn&& fn) {
    auto objs = site.objects(bound);
    int y = site.dom(r_edge);
    int w = site.cod(r_edge);
    for (int y2 : objs)
        for (const auto& p2 : site.hom(y, y2))
            for (int w2 : objs)
                for (const auto& s2 : site.hom(w, w2))
                    for (const auto& r2 : site.hom(y2, w2))
                        if (site.eq(site.compose(p2, r2), site.compose(r_edge, s2)))
                            fn(p2, r2, s2);
}

// IP3: pasting two independent squares yields an independent rectangle.
// IP4: if the rectangle is independent and the second square is an
//      independent pullback, the first square is independent.
template <class Site>
void check_ip3_ip4(const Site& site, int bound, const SquareList<Site>& all, AxiomCheck& ip3,
                   AxiomCheck& ip4) {
    ip3 = {"IP3", true, 0, ""};
    ip4 = {"IP4", true, 0, ""};
    for (const auto& A : all.squares) {
        bool a_indep = site.independent(A.p, A.q, A.r, A.s);
        for_pastable(site, bound, A.r, [&](const auto& p2, const auto& r2, const auto& s2) {
            auto top = site.compose(A.p, p2);    // p2 . p : X -> Y2
            auto bottom = site.compose(A.s, s2); // s2 . s : Z -> W2
            bool b_indep = site.independent(p2, A.r, r2, s2);
            bool ab_indep = site.independent(top, A.q, r2, bottom);
            if (a_indep && b_indep) {
                ++ip3.cases;
                if (ip3.pass && !ab_indep) {
                    ip3.pass = false;
                    ip3.counterexample = "A: " + detail::describe_square(site, A.p, A.q, A.r, A.s) +
                                         " | B: " + detail::describe_square(site, p2, A.r, r2, s2);
                }
            }
            if (ab_indep && site.independent_pullback(p2, A.r, r2, s2)) {
                ++ip4.cases;
                if (ip4.pass && !a_indep) {
                    ip4.pass = false;
                    ip4.counterexample = "A: " + detail::describe_square(site, A.p, A.q, A.r, A.s) +
                                         " | B: " + detail::describe_square(site, p2, A.r, r2, s2);
                }
            }
        });
    }
}

// IP5: every cospan completes to an independent pullback.
template <class Site>
AxiomCheck check_ip5(const Site& site, int bound) {
    AxiomCheck c{"IP5", true, 0, ""};
    auto objs = site.objects(bound);
    for (int y : objs)
        for (int z : objs)
            for (int w : objs)
                for (const auto& r : site.hom(y, w))
                    for (const auto& s : site.hom(z, w)) {
                        ++c.cases;
                        typename Site::Map p, q;
                        if (!site.completion(r, s, p, q) ||
                            !site.eq(site.compose(p, r), site.compose(q, s)) ||
                            !site.independent_pullback(p, q, r, s)) {
                            c.pass = false;
                            c.counterexample = "cospan r=" + site.describe(r) + " s=" + site.describe(s);
                            return c;
                        }
                    }
    return c;
}

// Descent: if the outer kite (p.e, q.e, r, s) is independent for some
// e : V -> X, then the inner square (p, q, r, s) is independent.
template <class Site>
AxiomCheck check_descent(const Site& site, int bound, const SquareList<Site>& all) {
    AxiomCheck c{"descent", true, 0, ""};
    auto objs = site.objects(bound);
    for (const auto& sq : all.squares) {
        int x = site.dom(sq.p);
        for (int v : objs)
            for (const auto& e : site.hom(v, x)) {
                if (!site.independent(site.compose(e, sq.p), site.compose(e, sq.q), sq.r, sq.s))
                    continue;
                ++c.cases;
                if (!site.independent(sq.p, sq.q, sq.r, sq.s)) {
                    c.pass = false;
                    c.counterexample = "e=" + site.describe(e) + " | " +
                                       detail::describe_square(site, sq.p, sq.q, sq.r, sq.s);
                    return c;
                }
            }
    }
    return c;
}

// Pasting lemma for independent pullbacks, both directions.
template <class Site>
AxiomCheck check_ip_lemma(const Site& site, int bound, const SquareList<Site>& all) {
    AxiomCheck c{"ip-lemma", true, 0, ""};
    for (const auto& A : all.squares) {
        bool a_ipb = site.independent_pullback(A.p, A.q, A.r, A.s);
        for_pastable(site, bound, A.r, [&](const auto& p2, const auto& r2, const auto& s2) {
            if (!c.pass) return;
            auto top = site.compose(A.p, p2);
            auto bottom = site.compose(A.s, s2);
            bool b_ipb = site.independent_pullback(p2, A.r, r2, s2);
            bool ab_ipb = site.independent_pullback(top, A.q, r2, bottom);
            if (a_ipb && b_ipb) {
                ++c.cases;
                if (!ab_ipb) {
                    c.pass = false;
                    c.counterexample = "paste: A: " +
                                       detail::describe_square(site, A.p, A.q, A.r, A.s) + " | B: " +
                                       detail::describe_square(site, p2, A.r, r2, s2);
                }
            }
            if (ab_ipb && b_ipb) {
                ++c.cases;
                if (!a_ipb) {
                    c.pass = false;
                    c.counterexample = "cancel: A: " +
                                       detail::describe_square(site, A.p, A.q, A.r, A.s) + " | B: " +
                                       detail::describe_square(site, p2, A.r, r2, s2);
                }
            }
        });
        if (!c.pass) break;
    }
    return c;
}

template <class Site>
AxiomReport check_ip_axioms_on(const Site& site, int bound) {
    AxiomReport report;
    auto all = SquareList<Site>::enumerate(site, bound);
    report.checks.push_back(check_ip1(site, bound));
    report.checks.push_back(check_ip2(site, all));
    AxiomCheck ip3, ip4;
    check_ip3_ip4(site, bound, all, ip3, ip4);
    report.checks.push_back(ip3);
    report.checks.push_back(ip4);
    report.checks.push_back(check_ip5(site, bound));
    report.checks.push_back(check_descent(site, bound, all));
    report.checks.push_back(check_ip_lemma(site, bound, all));
    return report;
}

} // namespace sheaflogic
