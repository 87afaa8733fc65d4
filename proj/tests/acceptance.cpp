// SPDX-License-Identifier: MIT
//
// Acceptance gate: ten criteria, one pass/fail line each, nonzero exit if
// any fails. Each criterion is self-contained and states its scale and
// verdict counts; wall-clock budgets are asserted where a criterion
// carries one.

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "sheaflogic/corpus.hpp"
#include "sheaflogic/forcing.hpp"
#include "sheaflogic/generic.hpp"
#include "sheaflogic/schanuel.hpp"
#include "sheaflogic/suites.hpp"
#include "sheaflogic/team.hpp"

using namespace sheaflogic;

namespace {

int failures = 0;

void criterion(int idx, const std::string& name,
               const std::function<std::pair<bool, std::string>()>& body) {
    auto t0 = std::chrono::steady_clock::now();
    bool pass = false;
    std::string details;
    try {
        auto [p, d] = body();
        pass = p;
        details = d;
    } catch (const std::exception& e) {
        details = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%2d/10] %s %s: %s (%.1f s)\n", idx, pass ? "PASS" : "FAIL", name.c_str(),
                details.c_str(), secs);
    std::fflush(stdout);
    failures += !pass;
}

SortPtr mk_sort(const std::string& name, int size) {
    std::vector<std::string> atoms;
    for (int i = 0; i < size; ++i) atoms.push_back(std::string(1, static_cast<char>('a' + i)));
    return std::make_shared<SortValueSet>(SortValueSet{name, std::move(atoms)});
}

TupleElem elem1(const SortPtr& sort, std::vector<int> vals) {
    FinSet om(static_cast<int>(vals.size()));
    return TupleElem(om, {NondetVar(om, sort, std::move(vals))});
}

// All name tuples of the given arity over a world, lexicographic.
std::vector<NameTuple> all_tuples(int world, int arity) {
    std::vector<NameTuple> out;
    if (world == 0 && arity > 0) return out;
    std::vector<int> t(static_cast<size_t>(arity), 0);
    for (;;) {
        out.push_back(NameTuple(NameSet(world), t));
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

} // namespace

int main() {
    // 1. The forcing oracle and the team evaluator agree on a seeded corpus
    //    of at least 500 (formula, assignment) pairs: sorts of at most 3
    //    values, samples of at most 3 points, quantifier depth at most 2.
    criterion(1, "oracle and evaluator agree on the seeded corpus", [] {
        auto t0 = std::chrono::steady_clock::now();
        CorpusOptions opts;
        opts.count = 500;
        auto items = make_corpus(1, opts);
        const Signature& sig = corpus_signature();
        long long divergences = 0;
        for (const auto& item : items) {
            bool by_oracle = force(item.rho, item.formula, sig);
            std::vector<std::pair<std::string, NondetVar>> rho(item.rho.bindings.begin(),
                                                               item.rho.bindings.end());
            bool by_teams = eval(item.formula, team_of_assignment(item.rho.sample, rho), sig);
            divergences += by_oracle != by_teams;
        }
        double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        char buf[128];
        std::snprintf(buf, sizeof buf, "%zu pairs, %lld divergences, %.1f s of < 60 s",
                      items.size(), divergences, secs);
        return std::make_pair(items.size() >= 500 && divergences == 0 && secs < 60.0,
                              std::string(buf));
    });

    // Criteria 2, 3, and 4 share one axiom-grid run: both sort sizes, a
    // team budget large enough that no grid instance is skipped.
    RunConfig grid_cfg;
    grid_cfg.sort_sizes = {2, 3};
    grid_cfg.max_teams = 1LL << 16;
    SuiteReport grid = run_axioms(grid_cfg);
    std::map<std::string, long long> fam_total, fam_failed;
    std::map<std::string, double> fam_ms;
    for (const auto& c : grid.checks) {
        std::string fam = c.name.substr(0, c.name.find(' '));
        ++fam_total[fam];
        fam_failed[fam] += c.status != CheckStatus::pass;
        fam_ms[fam] += c.wall_ms;
    }

    // 2. Every equivalence-axiom schema instance (vector lengths 0..2 over
    //    sorts of sizes 2 and 3) is valid, under the bounded-exhaustive
    //    team search, within the stated time budget.
    criterion(2, "equivalence axiom grid is valid", [&] {
        long long total = 0, failed = 0;
        double ms = 0;
        for (const char* fam : {"equiv:A", "equiv:B", "equiv:C", "equiv:D", "equiv:E",
                                "equiv:F", "equiv:G"}) {
            total += fam_total[fam];
            failed += fam_failed[fam];
            ms += fam_ms[fam];
        }
        char buf[128];
        std::snprintf(buf, sizeof buf, "%lld instances, %lld failures, %.1f s of < 60 s",
                      total, failed, ms / 1000.0);
        return std::make_pair(total >= 70 && failed == 0 && ms < 60000.0, std::string(buf));
    });

    // 3. Every independence-axiom schema instance is valid at the same
    //    scale — indep:P over all argument permutations and indep:Z
    //    included — and existence preservation holds for the 12-formula
    //    battery.
    criterion(3, "independence axiom grid and existence preservation are valid", [&] {
        long long total = 0, failed = 0;
        double ms = 0;
        for (const char* fam : {"indep:P", "indep:A", "indep:B", "indep:W", "indep:C",
                                "indep:D", "indep:Z", "existence-preservation"}) {
            total += fam_total[fam];
            failed += fam_failed[fam];
            ms += fam_ms[fam];
        }
        bool shape = fam_total["indep:P"] >= 128 && fam_total["indep:Z"] >= 54 &&
                     fam_total["existence-preservation"] == 12;
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "%lld instances (%lld permutation instances of indep:P, %lld of "
                      "existence-preservation), %lld failures, %.1f s",
                      total, fam_total["indep:P"], fam_total["existence-preservation"], failed,
                      ms / 1000.0);
        return std::make_pair(shape && failed == 0, std::string(buf));
    });

    // 4. The negative control — a universally quantified unconditional
    //    independence claim between two two-valued sorts — is refuted, and
    //    the countermodel is the diagonal team.
    criterion(4, "negative control refuted with the diagonal countermodel", [&] {
        for (const auto& c : grid.checks) {
            if (c.name != "negative-control") continue;
            if (c.status != CheckStatus::pass || !c.detail.contains("countermodel"))
                return std::make_pair(false, std::string("control was not refuted"));
            nlohmann::json expected = nlohmann::json::parse(
                R"({"context":[["x","A"],["y","C"]],"rows":[["a","c"],["b","d"]]})");
            bool diag = c.detail["countermodel"] == expected;
            return std::make_pair(diag, "countermodel " + c.detail["countermodel"].dump());
        }
        return std::make_pair(false, std::string("control check missing"));
    });

    // 5. The generic atomic-equivalence search coincides with the
    //    elementary equal-image relation on every pair of nondeterministic
    //    variables with sample size at most 4 over sorts of at most 3
    //    values.
    criterion(5, "generic atomic equivalence matches equal-image on all pairs", [] {
        TupleModel m;
        long long cases = 0, mismatches = 0;
        for (int n = 1; n <= 4; ++n)
            for (int c = 1; c <= 3; ++c) {
                auto S = mk_sort("S", c);
                const auto maps = all_maps(n, c);
                for (const auto& xv : maps)
                    for (const auto& yv : maps) {
                        const auto x = elem1(S, xv);
                        const auto y = elem1(S, yv);
                        ++cases;
                        mismatches += atomic_equiv(m, x, y) != equiextensive(x.cols[0], y.cols[0]);
                    }
            }
        char buf[96];
        std::snprintf(buf, sizeof buf, "%lld pairs, %lld mismatches", cases, mismatches);
        return std::make_pair(mismatches == 0, std::string(buf));
    });

    // 6. The generic conditional-independence square coincides with the
    //    elementary joint-realizability relation on every triple at the
    //    same scale.
    criterion(6, "generic conditional independence matches the elementary relation", [] {
        TupleModel m;
        long long cases = 0, mismatches = 0;
        for (int n = 1; n <= 4; ++n)
            for (int c = 1; c <= 3; ++c) {
                auto S = mk_sort("S", c);
                const auto maps = all_maps(n, c);
                for (const auto& xv : maps)
                    for (const auto& yv : maps) {
                        const auto x = elem1(S, xv);
                        const auto y = elem1(S, yv);
                        for (const auto& zv : maps) {
                            const auto z = elem1(S, zv);
                            ++cases;
                            mismatches += atomic_cond_indep(m, x, y, z) !=
                                          cond_indep(x.cols[0], y.cols[0], z.cols[0]);
                        }
                    }
            }
        char buf[96];
        std::snprintf(buf, sizeof buf, "%lld triples, %lld mismatches", cases, mismatches);
        return std::make_pair(mismatches == 0, std::string(buf));
    });

    // Criteria 7 and 8 share one category run at object bound 3.
    RunConfig cat_cfg;
    cat_cfg.category_bound = 3;
    SuiteReport cat = run_category(cat_cfg);

    // 7. The independent-pullback axioms, descent, and the pullback lemma
    //    hold exhaustively on both base sites: finite surjections over sets
    //    of size at most 3, and world inclusions over worlds of size at
    //    most 3.
    criterion(7, "independent-pullback axioms hold on both sites", [&] {
        long long checks = 0, failed = 0, cases = 0;
        bool lemma_both = true;
        for (const char* prefix : {"sur/", "iop/"}) {
            bool lemma = false;
            for (const auto& c : cat.checks) {
                if (c.name.rfind(prefix, 0) != 0) continue;
                ++checks;
                failed += c.status != CheckStatus::pass;
                cases += c.cases;
                lemma |= c.name == std::string(prefix) + "ip-lemma";
            }
            lemma_both = lemma_both && lemma;
        }
        char buf[96];
        std::snprintf(buf, sizeof buf, "%lld checks, %lld diagram cases, %lld failures",
                      checks, cases, failed);
        return std::make_pair(checks == 14 && lemma_both && failed == 0, std::string(buf));
    });

    // 8. The sheaf of sort-valued variables sends every independent square
    //    over sets of size at most 3 to a pullback of sets, for sorts of at
    //    most 3 values.
    criterion(8, "variable sheaf maps independent squares to set pullbacks", [&] {
        for (const auto& c : cat.checks) {
            if (c.name != "nv-pullback") continue;
            char buf[96];
            std::snprintf(buf, sizeof buf, "%lld square/side cases, %s", c.cases,
                          to_string(c.status));
            return std::make_pair(c.status == CheckStatus::pass && c.cases > 0,
                                  std::string(buf));
        }
        return std::make_pair(false, std::string("nv-pullback check missing"));
    });

    // 9. Nominal cross-checks: orbit equivalence and the support-based
    //    independence relation agree with the generic constructions for
    //    worlds up to 4 and arities up to 3, and the full axiom grid is
    //    valid under nominal evaluation at worlds up to 3.
    criterion(9, "nominal model agrees with generic constructions; axioms valid", [] {
        NominalModel m;
        long long cases = 0, mismatches = 0;
        for (int w = 1; w <= 4; ++w)
            for (int a = 0; a <= 3; ++a) {
                const auto tuples = all_tuples(w, a);
                for (const auto& t : tuples)
                    for (const auto& u : tuples) {
                        ++cases;
                        mismatches += atomic_equiv(m, t, u) != orbit_equiv(t, u);
                    }
            }
        for (int w = 1; w <= 4; ++w)
            for (int ax = 0; ax <= 3; ++ax)
                for (int ay = 0; ay <= 3; ++ay)
                    for (int az = 0; az <= 3; ++az)
                        for (const auto& x : all_tuples(w, ax))
                            for (const auto& y : all_tuples(w, ay))
                                for (const auto& z : all_tuples(w, az)) {
                                    ++cases;
                                    mismatches += atomic_cond_indep(m, x, y, z) !=
                                                  cond_indep_tuples(x, y, z);
                                }
        RunConfig cfg;
        cfg.model = "schanuel";
        cfg.world_bound = 3;
        SuiteReport rep = run_axioms(cfg);
        long long grid_failed = 0;
        for (const auto& c : rep.checks) grid_failed += c.status != CheckStatus::pass;
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "%lld cross-check cases, %lld mismatches; %zu grid checks, %lld failures",
                      cases, mismatches, rep.checks.size(), grid_failed);
        return std::make_pair(mismatches == 0 && grid_failed == 0, std::string(buf));
    });

    // 10. Metamorphic battery: oracle truth is invariant under sample
    //     restriction and under dropping bindings outside the free
    //     variables, for 1,000 seeded instances; and the canonical support
    //     of a restricted variable is stable, exhaustively at small scale.
    criterion(10, "metamorphic restriction/locality and support stability", [] {
        RunConfig cfg;
        cfg.metamorphic_count = 1000;
        SuiteReport rep = run_metamorphic(cfg);
        long long meta_cases = 0, support_cases = 0, failed = 0;
        for (const auto& c : rep.checks) {
            failed += c.status != CheckStatus::pass;
            if (c.name == "restriction-locality") meta_cases = c.cases;
            if (c.name == "support-stability") support_cases = c.cases;
        }
        char buf[128];
        std::snprintf(buf, sizeof buf,
                      "%lld metamorphic instances, %lld support cases, %lld failures",
                      meta_cases, support_cases, failed);
        return std::make_pair(meta_cases >= 1000 && support_cases > 0 && failed == 0,
                              std::string(buf));
    });

    std::printf("%s: %d of 10 criteria failed\n", failures ? "FAIL" : "OK", failures);
    return failures ? 1 : 0;
}
