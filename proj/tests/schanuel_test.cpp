// SPDX-License-Identifier: MIT
//
// The nominal model: worlds and reversed injections, name tuples, orbit
// equivalence, support-based independence, the independent-pullback axioms
// over that category, the generic constructions instantiated there, and
// forcing over name-tuple sorts.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <vector>

#include "sheaflogic/generic.hpp"
#include "sheaflogic/schanuel.hpp"

using namespace sheaflogic;

namespace {

NameTuple nt(int world, std::vector<int> entries) {
    return NameTuple(NameSet(world), std::move(entries));
}

// All tuples of the given arity over a world, lexicographic.
std::vector<NameTuple> all_tuples(int world, int arity) {
    std::vector<NameTuple> out;
    if (world == 0 && arity > 0) return out;
    std::vector<int> t(static_cast<size_t>(arity), 0);
    for (;;) {
        out.push_back(nt(world, t));
        int pos = arity - 1;
        while (pos >= 0 && t[static_cast<size_t>(pos)] == world - 1) {
            t[static_cast<size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
        ++t[static_cast<size_t>(pos)];
    }
    return out;
}

const char* kNames1 = "sort N = names(1)\nsort P = names(2)";

} // namespace

TEST_CASE("world maps: composition, identities, enumeration") {
    const auto id3 = iop_identity(NameSet(3));
    CHECK(id3.emb == std::vector<int>{0, 1, 2});

    const IopMap f(NameSet(3), NameSet(2), {2, 0}); // renaming 0|->2, 1|->0
    CHECK(iop_compose(id3, f) == f);
    CHECK(iop_compose(f, iop_identity(NameSet(2))) == f);

    const IopMap g(NameSet(2), NameSet(1), {1});
    const auto fg = iop_compose(f, g);
    CHECK(fg.emb == std::vector<int>{0});
    CHECK(fg.dom.size == 3);
    CHECK(fg.cod.size == 1);

    CHECK(all_iop_maps(NameSet(3), NameSet(2)).size() == 6);
    CHECK(all_iop_maps(NameSet(3), NameSet(3)).size() == 6);
    CHECK(all_iop_maps(NameSet(2), NameSet(3)).empty());
    CHECK(all_iop_maps(NameSet(3), NameSet(0)).size() == 1);
    CHECK(all_iop_maps(NameSet(0), NameSet(0)).size() == 1);

    CHECK_THROWS_AS(IopMap(NameSet(2), NameSet(2), {0, 0}), invalid_input);
    CHECK_THROWS_AS(IopMap(NameSet(2), NameSet(1), {5}), invalid_input);
    CHECK_THROWS_AS(IopMap(NameSet(2), NameSet(2), {0}), invalid_input);
    CHECK_THROWS_AS(iop_inclusion(NameSet(1), NameSet(2)), invalid_input);
    CHECK_THROWS_AS(NameSet(-1), invalid_input);
}

TEST_CASE("restricting tuples") {
    const auto incl = iop_inclusion(NameSet(3), NameSet(2));
    CHECK(restrict_tuple(nt(2, {0, 1}), incl) == nt(3, {0, 1}));
    CHECK(restrict_tuple(nt(2, {0, 0}), incl) == nt(3, {0, 0}));

    const IopMap ren(NameSet(3), NameSet(2), {2, 0}); // 0|->2, 1|->0
    CHECK(restrict_tuple(nt(2, {0, 1}), ren) == nt(3, {2, 0}));

    CHECK_THROWS_AS(restrict_tuple(nt(3, {0}), incl), invalid_input);
    CHECK_THROWS_AS(nt(2, {0, 2}), invalid_input);
}

TEST_CASE("supports of tuples") {
    CHECK(support(nt(2, {0, 1, 0})) == std::vector<int>{0, 1});
    CHECK(support(nt(3, {})) == std::vector<int>{});
    CHECK(support(nt(3, {2, 2})) == std::vector<int>{2});

    // support(restrict(t, f)) is the image of support(t) under the embedding.
    for (const auto& t : all_tuples(2, 2))
        for (const auto& f : all_iop_maps(NameSet(4), NameSet(2))) {
            std::vector<int> mapped;
            for (int n : support(t)) mapped.push_back(f.emb[static_cast<size_t>(n)]);
            std::sort(mapped.begin(), mapped.end());
            CHECK(support(restrict_tuple(t, f)) == mapped);
        }
}

TEST_CASE("orbit equivalence") {
    CHECK(orbit_equiv(nt(3, {0, 1}), nt(3, {2, 1})));
    CHECK_FALSE(orbit_equiv(nt(3, {0, 0}), nt(3, {0, 1})));
    CHECK(orbit_equiv(nt(3, {0, 0}), nt(3, {0, 0})));
    CHECK_THROWS_AS(orbit_equiv(nt(3, {0}), nt(3, {0, 1})), invalid_input);
    CHECK_THROWS_AS(orbit_equiv(nt(2, {0}), nt(3, {0})), invalid_input);

    // Pattern equality coincides with "some world permutation carries t to u".
    for (int w = 1; w <= 3; ++w)
        for (int a = 0; a <= 3; ++a) {
            const auto tuples = all_tuples(w, a);
            std::vector<int> perm(static_cast<size_t>(w));
            for (const auto& t : tuples)
                for (const auto& u : tuples) {
                    bool by_perm = false;
                    std::iota(perm.begin(), perm.end(), 0);
                    do {
                        bool hit = true;
                        for (size_t i = 0; i < t.entries.size() && hit; ++i)
                            hit = perm[static_cast<size_t>(t.entries[i])] == u.entries[i];
                        by_perm = by_perm || hit;
                    } while (!by_perm && std::next_permutation(perm.begin(), perm.end()));
                    CHECK(orbit_equiv(t, u) == by_perm);
                }
        }
}

TEST_CASE("support-based conditional independence") {
    CHECK(cond_indep_tuples(nt(3, {0, 1}), nt(3, {1, 2}), nt(3, {1})));
    CHECK_FALSE(cond_indep_tuples(nt(3, {0, 1}), nt(3, {1, 2}), nt(3, {2})));
    CHECK(cond_indep_tuples(nt(3, {0}), nt(3, {1}), nt(3, {})));
    CHECK_THROWS_AS(cond_indep_tuples(nt(2, {0}), nt(3, {0}), nt(3, {})), invalid_input);
}

TEST_CASE("squares of world maps") {
    SUBCASE("completion of a shared-name cospan") {
        const IopMap r(NameSet(2), NameSet(1), {0});
        const IopMap s(NameSet(2), NameSet(1), {0});
        const auto sq = iop_independent_pullback(r, s);
        CHECK(sq.p.dom.size == 3); // two worlds glued along one shared name
        CHECK(sq.p.emb == std::vector<int>{0, 1});
        CHECK(sq.q.emb == std::vector<int>{0, 2});
        CHECK(iop_is_independent(sq));
        CHECK(iop_is_independent_pullback(sq));
    }
    SUBCASE("identity cospan completes to the identity square") {
        const auto id2 = iop_identity(NameSet(2));
        const auto sq = iop_independent_pullback(id2, id2);
        CHECK(sq.p == id2);
        CHECK(sq.q == id2);
    }
    SUBCASE("unwitnessed collision is not independent") {
        const IopMap p(NameSet(2), NameSet(1), {0});
        const IopMap q(NameSet(2), NameSet(1), {0});
        const IopMap rw(NameSet(1), NameSet(0), {});
        const IopSquare sq{p, q, rw, rw};
        CHECK_FALSE(iop_is_independent(sq));
    }
    SUBCASE("disjoint images: independent, and a pullback when they cover") {
        const IopMap p(NameSet(2), NameSet(1), {0});
        const IopMap q(NameSet(2), NameSet(1), {1});
        const IopMap rw(NameSet(1), NameSet(0), {});
        const IopSquare sq{p, q, rw, rw};
        CHECK(iop_is_independent(sq));
        CHECK(iop_is_independent_pullback(sq));
        // A larger apex leaves a name uncovered: still independent, no longer
        // a pullback.
        const IopMap p3(NameSet(3), NameSet(1), {0});
        const IopMap q3(NameSet(3), NameSet(1), {1});
        const IopSquare sq3{p3, q3, rw, rw};
        CHECK(iop_is_independent(sq3));
        CHECK_FALSE(iop_is_independent_pullback(sq3));
    }
    SUBCASE("every completion is an independent pullback") {
        for (int ny = 0; ny <= 3; ++ny)
            for (int nz = 0; nz <= 3; ++nz)
                for (int nw = 0; nw <= std::min(ny, nz); ++nw)
                    for (const auto& r : all_iop_maps(NameSet(ny), NameSet(nw)))
                        for (const auto& s : all_iop_maps(NameSet(nz), NameSet(nw))) {
                            const auto sq = iop_independent_pullback(r, s);
                            CHECK(iop_is_independent_pullback(sq));
                            CHECK(sq.p.dom.size == ny + nz - nw);
                        }
    }
    SUBCASE("ill-formed squares are rejected") {
        const IopMap p(NameSet(2), NameSet(1), {0});
        const IopMap q(NameSet(2), NameSet(1), {1});
        const IopMap bad(NameSet(1), NameSet(1), {0});
        CHECK_THROWS_AS(iop_is_independent(IopSquare{p, q, bad, bad}),
                        invalid_input); // p.r != q.s
        CHECK_THROWS_AS(iop_independent_pullback(p, IopMap(NameSet(2), NameSet(2), {0, 1})),
                        invalid_input); // cospan targets differ
    }
}

TEST_CASE("independent-pullback axioms hold over worlds of size <= 3") {
    const auto report = check_ip_axioms_nominal(3);
    for (const auto& c : report.checks) {
        CHECK_MESSAGE(c.pass, c.name, ": ", c.counterexample);
        CHECK(c.cases > 0);
    }
    CHECK(report.all_pass());
}

TEST_CASE("generic constructions instantiated at the nominal model") {
    NominalModel m;

    SUBCASE("atomic equivalence is orbit equivalence (worlds <= 4, arity <= 3)") {
        for (int w = 1; w <= 4; ++w)
            for (int a = 0; a <= 3; ++a) {
                const auto tuples = all_tuples(w, a);
                for (const auto& t : tuples)
                    for (const auto& u : tuples)
                        CHECK_MESSAGE(atomic_equiv(m, t, u) == orbit_equiv(t, u), "w=", w,
                                      " a=", a);
            }
    }

    SUBCASE("atomic conditional independence is the support check (worlds <= 4)") {
        for (int w = 1; w <= 4; ++w)
            for (int ax = 0; ax <= 2; ++ax)
                for (int ay = 0; ay <= 2; ++ay)
                    for (int az = 0; az <= 2; ++az)
                        for (const auto& x : all_tuples(w, ax))
                            for (const auto& y : all_tuples(w, ay))
                                for (const auto& z : all_tuples(w, az))
                                    CHECK(atomic_cond_indep(m, x, y, z) ==
                                          cond_indep_tuples(x, y, z));
        // Arity-3 spot check at the largest world.
        for (const auto& x : all_tuples(4, 3))
            for (const auto& y : all_tuples(4, 3)) {
                const auto z = nt(4, {0, 1, 2});
                CHECK(atomic_cond_indep(m, x, y, z) == cond_indep_tuples(x, y, z));
            }
    }

    SUBCASE("supports via the model interface") {
        const auto sp = m.support(nt(4, {3, 1, 3}));
        CHECK(sp.obj.size == 2);
        CHECK(sp.map.emb == std::vector<int>{1, 3});
        CHECK(sp.elem == nt(2, {1, 0, 1}));
        CHECK(m.elem_eq(m.restrict_elem(sp.elem, sp.map), nt(4, {3, 1, 3})));
    }

    SUBCASE("support stability under restriction") {
        for (const auto& t : all_tuples(2, 2)) {
            const auto sp = m.support(t);
            for (int w2 = 2; w2 <= 4; ++w2)
                for (const auto& q : all_iop_maps(NameSet(w2), NameSet(2))) {
                    const auto comp = iop_compose(q, sp.map);
                    CHECK(m.elem_eq(m.restrict_elem(sp.elem, comp), restrict_tuple(t, q)));
                    CHECK(m.support(restrict_tuple(t, q)).obj == sp.obj);
                }
        }
    }

    SUBCASE("supports of products") {
        const auto sp = support_of_product(m, nt(4, {3, 1, 3}), nt(4, {0}));
        CHECK(sp.obj.size == 3); // names {0, 1, 3}
        CHECK(sp.map.emb == std::vector<int>{0, 1, 3});
        CHECK(sp.elem == nt(3, {2, 1, 2, 0}));
    }

    SUBCASE("independent copies: frozen shape") {
        const auto ic = independent_copy(m, nt(2, {0, 1}), nt(2, {0}));
        CHECK(ic.p.dom.size == 3);
        CHECK(ic.p.emb == std::vector<int>{0, 1});
        CHECK(ic.y == nt(3, {0, 2}));
    }

    SUBCASE("independent copies: both defining properties") {
        for (int w = 1; w <= 3; ++w)
            for (int ax = 0; ax <= 2; ++ax)
                for (int aw = 0; aw <= 2; ++aw)
                    for (const auto& x : all_tuples(w, ax))
                        for (const auto& wv : all_tuples(w, aw)) {
                            const auto ic = independent_copy(m, x, wv);
                            const auto xp = m.restrict_elem(x, ic.p);
                            const auto wp = m.restrict_elem(wv, ic.p);
                            CHECK(atomic_equiv(m, m.pair_elems(ic.y, wp),
                                               m.pair_elems(xp, wp)));
                            for (const auto& u : all_tuples(w, 2)) {
                                const auto up = m.restrict_elem(u, ic.p);
                                CHECK(atomic_cond_indep(m, ic.y, up, wp));
                            }
                        }
    }
}

TEST_CASE("nominal forcing: frozen examples") {
    const Signature sig = parse_signature(kNames1);

    SUBCASE("a fresh name always exists") {
        const auto f = parse_formula("exists y:N. not eq(x, y)");
        CHECK(eval_nominal(f, NameSet(1), {{"x", "N", nt(1, {0})}}, sig));
        CHECK(eval_nominal(f, NameSet(3), {{"x", "N", nt(3, {2})}}, sig));
    }
    SUBCASE("reflexivity is valid") {
        const auto f = parse_formula("forall x:N. equiv(x ; x)");
        const auto v = valid_nominal(f, Context{}, sig, 3);
        CHECK(v.valid);
        CHECK(v.cases == 4); // one sentence evaluation per world size 0..3
    }
    SUBCASE("unconditional independence of all pairs fails") {
        const auto f = parse_formula("forall x:N. forall y:N. indep(x ; y | )");
        for (int w = 1; w <= 3; ++w) CHECK_FALSE(eval_nominal(f, NameSet(w), {}, sig));
        const auto v = valid_nominal(f, Context{}, sig, 3);
        CHECK_FALSE(v.valid);
    }
    SUBCASE("two names cannot be forced apart by equivalence") {
        const auto f = parse_formula("equiv(x ; y)");
        CHECK(eval_nominal(f, NameSet(2), {{"x", "N", nt(2, {0})}, {"y", "N", nt(2, {1})}},
                           sig));
        const auto g = parse_formula("eq(x, y)");
        CHECK_FALSE(eval_nominal(g, NameSet(2), {{"x", "N", nt(2, {0})}, {"y", "N", nt(2, {1})}},
                                 sig));
    }
    SUBCASE("pair sorts quantify over pairs") {
        // Some pair shares no name with x: needs two fresh names.
        const auto f = parse_formula("exists p:P. indep(p ; x | )");
        CHECK(eval_nominal(f, NameSet(1), {{"x", "N", nt(1, {0})}}, sig));
        // No pair can avoid every name of a world mentioned by x unless the
        // world grows, which the quantifier permits; conversely a diagonal
        // pair with both entries equal to x's name is never independent of x.
        const auto g = parse_formula("forall p:P. indep(p ; x | )");
        CHECK_FALSE(eval_nominal(g, NameSet(1), {{"x", "N", nt(1, {0})}}, sig));
    }
}

TEST_CASE("nominal forcing: memoisation and equivariance") {
    const Signature sig = parse_signature(kNames1);
    const std::vector<const char*> battery = {
        "equiv(x ; y)",
        "indep(x ; y | )",
        "exists u:N. (eq(u, x) and not eq(u, y))",
        "forall u:N. (equiv(u, x ; u, y) or eq(x, y))",
        "exists u:N. exists v:N. (equiv(u,v ; x,y) and indep(u ; v | y))",
        "forall p:P. exists u:N. indep(p ; u | )",
    };
    for (const auto* text : battery) {
        const auto f = parse_formula(text);
        for (int w = 1; w <= 3; ++w)
            for (const auto& xv : all_tuples(w, 1))
                for (const auto& yv : all_tuples(w, 1)) {
                    const std::vector<NominalBinding> rho = {{"x", "N", xv}, {"y", "N", yv}};
                    const bool plain = eval_nominal(f, NameSet(w), rho, sig, false);
                    CHECK_MESSAGE(eval_nominal(f, NameSet(w), rho, sig, true) == plain,
                                  text, " w=", w);
                    // Permuting the world leaves the verdict alone.
                    std::vector<int> perm(static_cast<size_t>(w));
                    std::iota(perm.begin(), perm.end(), 0);
                    while (std::next_permutation(perm.begin(), perm.end())) {
                        const IopMap sigma{NameSet(w), NameSet(w), perm};
                        const std::vector<NominalBinding> prho = {
                            {"x", "N", restrict_tuple(xv, sigma)},
                            {"y", "N", restrict_tuple(yv, sigma)}};
                        CHECK(eval_nominal(f, NameSet(w), prho, sig, false) == plain);
                    }
                }
    }
}

TEST_CASE("nominal forcing: axiom schemas hold") {
    const Signature sig = parse_signature(kNames1);
    SchemaArgs one;
    one.x_sorts = {"N"};
    one.y_sorts = {"N"};
    one.z_sorts = {"N"};
    one.w_sorts = {"N"};
    one.pi = {0};
    one.pi_y = {0};
    one.pi_z = {0};

    for (const char* id : {"equiv:A", "equiv:B", "equiv:C", "equiv:D", "equiv:E", "equiv:G",
                           "indep:P", "indep:A", "indep:B", "indep:W", "indep:C", "indep:D",
                           "indep:Z"}) {
        const auto f = instantiate_schema(id, one);
        const auto v = valid_nominal(f, Context{}, sig, 2);
        CHECK_MESSAGE(v.valid, id, " fails at world ", v.world);
    }

    // A pair-sorted spot check of the transfer and copy axioms.
    SchemaArgs pair;
    pair.x_sorts = {"P"};
    pair.y_sorts = {"N"};
    pair.z_sorts = {"P"};
    pair.w_sorts = {"N"};
    for (const char* id : {"equiv:G", "indep:Z", "indep:A"}) {
        const auto f = instantiate_schema(id, pair);
        const auto v = valid_nominal(f, Context{}, sig, 2);
        CHECK_MESSAGE(v.valid, id, " fails at world ", v.world);
    }
}

TEST_CASE("nominal forcing: input validation") {
    const Signature sig = parse_signature("sort N = names(1)\nsort A = {a, b}\nrel R = diamond A {a}");
    CHECK_THROWS_AS(eval_nominal(parse_formula("eq(x, y)"), NameSet(2),
                                 {{"x", "N", nt(2, {0})}}, sig),
                    invalid_input); // unbound y
    CHECK_THROWS_AS(eval_nominal(parse_formula("eq(x, x)"), NameSet(2),
                                 {{"x", "N", nt(3, {0})}}, sig),
                    invalid_input); // wrong world
    CHECK_THROWS_AS(eval_nominal(parse_formula("eq(x, x)"), NameSet(2),
                                 {{"x", "N", nt(2, {0, 1})}}, sig),
                    invalid_input); // arity mismatch
    CHECK_THROWS_AS(eval_nominal(parse_formula("eq(x, x)"), NameSet(2),
                                 {{"x", "A", nt(2, {0})}}, sig),
                    invalid_input); // enumerated sort
    CHECK_THROWS_AS(eval_nominal(parse_formula("exists u:A. R(u)"), NameSet(1), {}, sig),
                    invalid_input); // quantifier over an enumerated sort
    CHECK_THROWS_AS(valid_nominal(parse_formula("eq(x, x)"), Context{}, sig, 2), invalid_input);
}

TEST_CASE("name-tuple JSON round trip") {
    const auto t = nt(3, {0, 2, 2});
    const auto j = to_json(t);
    CHECK(j.dump() == R"({"entries":[0,2,2],"world":3})");
    CHECK(name_tuple_from_json(j) == t);
    CHECK(name_tuple_from_json(to_json(nt(0, {}))) == nt(0, {}));
    CHECK_THROWS_AS(name_tuple_from_json(nlohmann::json::array()), invalid_input);
    CHECK_THROWS_AS(name_tuple_from_json(nlohmann::json{{"world", 1}, {"entries", {5}}}),
                    invalid_input);
    CHECK_THROWS_AS(name_tuple_from_json(nlohmann::json{{"world", "x"}, {"entries", {0}}}),
                    invalid_input);
}
