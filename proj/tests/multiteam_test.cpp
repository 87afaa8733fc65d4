// Tests for nondeterministic variables: restriction/descent (the sheaf
// condition), equiextension, conditional independence, box/diamond
// membership, supports, subsheaf closure, and the pullback-preservation
// property of the presheaf on independent squares.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "sheaflogic/errors.hpp"
#include "sheaflogic/fincat.hpp"
#include "sheaflogic/multiteam.hpp"

using namespace sheaflogic;

namespace {

SortPtr sort_ab() { return std::make_shared<SortValueSet>("V", std::vector<std::string>{"a", "b"}); }

SortPtr sort_n(int k) {
    std::vector<std::string> atoms;
    for (int i = 0; i < k; ++i) atoms.push_back(std::to_string(i));
    return std::make_shared<SortValueSet>("N" + std::to_string(k), std::move(atoms));
}

NondetVar nv(SortPtr s, std::vector<int> vals) {
    int n = static_cast<int>(vals.size());
    return NondetVar(FinSet(n), std::move(s), std::move(vals));
}

FinSurjection sur(int dom, int cod, std::vector<int> map) {
    return FinSurjection(FinSet(dom), FinSet(cod), std::move(map));
}

// All variables on a sample of size n over the given sort.
std::vector<NondetVar> all_vars(int n, const SortPtr& s) {
    std::vector<NondetVar> out;
    for (auto& m : all_maps(n, s->size())) out.push_back(NondetVar(FinSet(n), s, std::move(m)));
    return out;
}

} // namespace

TEST_CASE("SortValueSet validation") {
    CHECK_NOTHROW(SortValueSet("A", {"x"}));
    CHECK_THROWS_AS(SortValueSet("A", {}), invalid_input);
    CHECK_THROWS_AS(SortValueSet("A", {"x", "x"}), invalid_input);
    CHECK(sort_ab()->index_of("b") == 1);
    CHECK(sort_ab()->index_of("zzz") == -1);
}

TEST_CASE("NondetVar validation") {
    auto s = sort_ab();
    CHECK_NOTHROW(nv(s, {0, 1, 0}));
    CHECK_THROWS_AS(NondetVar(FinSet(3), s, {0, 1}), invalid_input);     // length
    CHECK_THROWS_AS(NondetVar(FinSet(2), s, {0, 2}), invalid_input);     // range
    CHECK_THROWS_AS(NondetVar(FinSet(2), nullptr, {0, 0}), invalid_input);
    // Surjectivity onto the sort is NOT required.
    CHECK_NOTHROW(nv(sort_n(5), {0, 0, 0}));
}

TEST_CASE("restrict_var is precomposition") {
    auto s = sort_ab();
    auto x = nv(s, {0, 1}); // [a,b]

    SUBCASE("frozen example") {
        auto r = restrict_var(x, sur(3, 2, {0, 0, 1}));
        CHECK(r.values == std::vector<int>{0, 0, 1}); // [a,a,b]
    }
    SUBCASE("identity leaves the variable unchanged") {
        CHECK(restrict_var(x, identity(FinSet(2))) == x);
    }
    SUBCASE("constants restrict to constants") {
        auto c = nv(s, {1, 1});
        auto r = restrict_var(c, sur(4, 2, {0, 1, 1, 0}));
        CHECK(r.values == std::vector<int>{1, 1, 1, 1});
    }
    SUBCASE("sample mismatch rejected") {
        CHECK_THROWS_AS(restrict_var(x, sur(3, 3, {0, 1, 2})), invalid_input);
    }
}

TEST_CASE("is_invariant and descend") {
    auto s = sort_ab();
    auto c = sur(3, 2, {0, 0, 1});

    SUBCASE("fiber-constant variable descends") {
        auto y = nv(s, {0, 0, 1}); // [a,a,b]
        CHECK(is_invariant(y, c));
        auto x = descend(y, c);
        CHECK(x.values == std::vector<int>{0, 1}); // [a,b]
        CHECK(restrict_var(x, c) == y);
    }
    SUBCASE("fiber-broken variable does not") {
        auto y = nv(s, {0, 1, 1}); // [a,b,b]: fiber {0,1} sees both atoms
        CHECK_FALSE(is_invariant(y, c));
        CHECK_THROWS_AS(descend(y, c), not_invariant);
    }
    SUBCASE("bijective restriction is always invariant") {
        auto swap2 = sur(2, 2, {1, 0});
        for (const auto& y : all_vars(2, s)) {
            CHECK(is_invariant(y, swap2));
            CHECK(restrict_var(descend(y, swap2), swap2) == y);
        }
    }
    SUBCASE("identity descend is the variable itself") {
        auto y = nv(s, {1, 0, 1});
        CHECK(descend(y, identity(FinSet(3))) == y);
    }
}

TEST_CASE("sheaf condition: descend/restrict round trips, exhaustive to size 4") {
    auto s = sort_ab();
    for (int n = 1; n <= 3; ++n)
        for (int m = n; m <= 4; ++m)
            for (const auto& c : all_surjections(FinSet(m), FinSet(n))) {
                for (const auto& x : all_vars(n, s)) {
                    auto y = restrict_var(x, c);
                    CHECK(is_invariant(y, c));
                    CHECK(descend(y, c) == x);
                }
                for (const auto& y : all_vars(m, s)) {
                    if (!is_invariant(y, c)) {
                        CHECK_THROWS_AS(descend(y, c), not_invariant);
                        continue;
                    }
                    CHECK(restrict_var(descend(y, c), c) == y);
                }
            }
}

TEST_CASE("equiextensive compares images") {
    auto s = sort_ab();
    CHECK(equiextensive(nv(s, {0, 1, 0}), nv(s, {1, 0, 1})));
    CHECK_FALSE(equiextensive(nv(s, {0, 0, 0}), nv(s, {0, 1, 0})));
    auto x = nv(s, {1, 0});
    CHECK(equiextensive(x, x));
    CHECK_THROWS_AS(equiextensive(nv(s, {0}), nv(s, {0, 0})), invalid_input);

    SUBCASE("equivalence relation on enumerated variables") {
        auto vars = all_vars(3, sort_n(3));
        for (const auto& a : vars)
            for (const auto& b : vars) {
                CHECK(equiextensive(a, b) == equiextensive(b, a));
                for (const auto& c : vars)
                    if (equiextensive(a, b) && equiextensive(b, c)) CHECK(equiextensive(a, c));
            }
    }
}

TEST_CASE("equiextension is the existence of a common restriction") {
    // x and y have equal images iff some pair of restrictions of x and y to a
    // shared sample set are literally equal.
    auto s = sort_n(2);
    for (int n = 1; n <= 3; ++n)
        for (const auto& x : all_vars(n, s))
            for (const auto& y : all_vars(n, s)) {
                bool witnessed = false;
                for (int m = 1; m <= 4 && !witnessed; ++m)
                    for (const auto& u : all_surjections(FinSet(m), FinSet(n)))
                        for (const auto& v : all_surjections(FinSet(m), FinSet(n)))
                            if (restrict_var(x, u) == restrict_var(y, v)) {
                                witnessed = true;
                                break;
                            }
                CHECK(equiextensive(x, y) == witnessed);
            }
}

TEST_CASE("cond_indep") {
    auto s = sort_n(2);

    SUBCASE("full product over a constant condition") {
        auto x = nv(s, {0, 0, 1, 1});
        auto y = nv(s, {0, 1, 0, 1});
        auto z = nv(s, {0, 0, 0, 0});
        CHECK(cond_indep(x, y, z));
    }
    SUBCASE("perfectly correlated pair is dependent") {
        auto x = nv(s, {0, 1});
        auto y = nv(s, {0, 1});
        auto z = nv(s, {0, 0});
        CHECK_FALSE(cond_indep(x, y, z)); // (0,1) never realized
    }
    SUBCASE("anything is independent of y given y") {
        for (const auto& x : all_vars(3, s))
            for (const auto& y : all_vars(3, sort_n(3))) CHECK(cond_indep(x, y, y));
    }
    SUBCASE("symmetric in the first two arguments") {
        auto vars = all_vars(3, s);
        for (const auto& x : vars)
            for (const auto& y : vars)
                for (const auto& z : vars) CHECK(cond_indep(x, y, z) == cond_indep(y, x, z));
    }
    SUBCASE("sample mismatch rejected") {
        CHECK_THROWS_AS(cond_indep(nv(s, {0}), nv(s, {0, 1}), nv(s, {0})), invalid_input);
    }
}

TEST_CASE("box and diamond membership") {
    auto s = sort_n(2);
    CHECK(box_member(nv(s, {1, 1}), {"1"}));
    CHECK_FALSE(box_member(nv(s, {0, 1}), {"1"}));
    CHECK(diamond_member(nv(s, {0, 1}), {"1"}));
    CHECK_FALSE(diamond_member(nv(s, {0, 0}), {"1"}));
    CHECK(box_member(nv(s, {0, 1}), {"0", "1"}));          // whole sort
    CHECK_FALSE(diamond_member(nv(s, {0, 1}), {}));        // empty subset
    CHECK_FALSE(box_member(nv(s, {0}), {}));
    CHECK_THROWS_AS(box_member(nv(s, {0}), {"7"}), invalid_input);
}

TEST_CASE("support factors a variable through its image") {
    auto s = sort_ab();

    SUBCASE("frozen example") {
        auto res = support(nv(s, {0, 1, 0})); // [a,b,a]
        CHECK(res.sample_s.size == 2);
        CHECK(res.p.map == std::vector<int>{0, 1, 0});
        CHECK(res.xs.values == std::vector<int>{0, 1});
    }
    SUBCASE("injective variable has identity support map") {
        auto res = support(nv(sort_n(3), {2, 0, 1}));
        CHECK(res.p == identity(FinSet(3)));
    }
    SUBCASE("constant variable is supported on a point") {
        auto res = support(nv(s, {1, 1, 1, 1}));
        CHECK(res.sample_s.size == 1);
    }
    SUBCASE("recomposition and injectivity, exhaustively") {
        for (const auto& x : all_vars(3, sort_n(3))) {
            auto res = support(x);
            CHECK(restrict_var(res.xs, res.p) == x);
            std::set<int> distinct(res.xs.values.begin(), res.xs.values.end());
            CHECK(static_cast<int>(distinct.size()) == res.sample_s.size);
        }
    }
    SUBCASE("terminality: any other factorisation maps onto the support") {
        // If x = x2 . p2 with p2 : Omega -> M, then the support factors
        // through M: there is t : M -> sample_s with t . p2 = p and
        // x2 = xs . t. Enumerate to check existence and uniqueness.
        auto x = nv(s, {0, 1, 0, 1});
        auto res = support(x);
        for (int m = 1; m <= 4; ++m)
            for (const auto& p2 : all_surjections(FinSet(4), FinSet(m)))
                for (const auto& x2 : all_vars(m, s)) {
                    if (!(restrict_var(x2, p2) == x)) continue;
                    int mediators = 0;
                    for (const auto& t : all_surjections(FinSet(m), res.sample_s))
                        if (compose(p2, t) == res.p && restrict_var(res.xs, t) == x2) ++mediators;
                    CHECK(mediators == 1);
                }
    }
}

TEST_CASE("subsheaf closure reports") {
    for (auto rel : {SubsheafRelation::equiextension, SubsheafRelation::cond_indep,
                     SubsheafRelation::box, SubsheafRelation::diamond}) {
        auto report = check_subsheaf_closure(rel, 3);
        REQUIRE(report.checks.size() == 2);
        for (const auto& c : report.checks) {
            INFO(to_string(rel), " ", c.name, ": ", c.counterexample);
            CHECK(c.pass);
            CHECK(c.cases > 0);
        }
    }
    CHECK_THROWS_AS(check_subsheaf_closure(SubsheafRelation::box, 0), invalid_input);
    CHECK_THROWS_AS(check_subsheaf_closure(SubsheafRelation::box, 5), invalid_input);
}

TEST_CASE("independent squares are sent to pullbacks of sections") {
    // For an independent square with span (p : X->Y, q : X->Z) over cospan
    // (r : Y->W, s : Z->W), every pair of variables u on Y, v on Z with
    // u.p = v.q glues to exactly one variable w on W with w.r = u, w.s = v.
    auto s = sort_ab();
    for (int y = 1; y <= 3; ++y)
        for (int z = 1; z <= 3; ++z)
            for (int w = 1; w <= 2; ++w)
                for (const auto& r : all_surjections(FinSet(y), FinSet(w)))
                    for (const auto& sb : all_surjections(FinSet(z), FinSet(w)))
                        for (int x = 1; x <= 3; ++x)
                            for (const auto& p : all_surjections(FinSet(x), FinSet(y)))
                                for (const auto& q : all_surjections(FinSet(x), FinSet(z))) {
                                    if (!(compose(p, r) == compose(q, sb))) continue;
                                    CommutingSquare sq(p, q, r, sb);
                                    if (!is_independent_square(sq)) continue;
                                    for (const auto& u : all_vars(y, s))
                                        for (const auto& v : all_vars(z, s)) {
                                            if (!(restrict_var(u, p) == restrict_var(v, q)))
                                                continue;
                                            int gluings = 0;
                                            for (const auto& wv : all_vars(w, s))
                                                if (restrict_var(wv, r) == u &&
                                                    restrict_var(wv, sb) == v)
                                                    ++gluings;
                                            CHECK(gluings == 1);
                                        }
                                }
}

TEST_CASE("NondetVar JSON round trip") {
    auto s = sort_ab();
    auto x = nv(s, {0, 1, 0});
    auto j = to_json(x);
    CHECK(j["sample"] == 3);
    CHECK(j["sort"] == "V");
    CHECK(j["values"] == nlohmann::json::array({"a", "b", "a"}));
    auto back = nondet_var_from_json(j, {s});
    CHECK(back == x);

    CHECK_THROWS_AS(nondet_var_from_json(nlohmann::json{{"sample", 1}}, {s}), invalid_input);
    auto bad_sort = j;
    bad_sort["sort"] = "nope";
    CHECK_THROWS_AS(nondet_var_from_json(bad_sort, {s}), invalid_input);
    auto bad_val = j;
    bad_val["values"] = {"a", "q", "a"};
    CHECK_THROWS_AS(nondet_var_from_json(bad_val, {s}), invalid_input);
}
