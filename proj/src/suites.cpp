// Verification suites behind the command-line workbench: axiom grids,
// oracle differentials, category checks, metamorphic batteries, and
// single-formula checks. Every suite is deterministic for a fixed
// configuration and seed; parallel workers only split index ranges and
// results are merged in canonical order.

#include "sheaflogic/suites.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <thread>

#include "sheaflogic/corpus.hpp"
#include "sheaflogic/errors.hpp"
#include "sheaflogic/fincat.hpp"
#include "sheaflogic/forcing.hpp"
#include "sheaflogic/multiteam.hpp"
#include "sheaflogic/schanuel.hpp"
#include "sheaflogic/team.hpp"

namespace sheaflogic {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Run one check body under a timer, converting resource exhaustion into a
// status instead of an escaping exception. Input errors keep propagating:
// they mean the run itself is ill-formed.
template <class F>
CheckResult timed_check(std::string name, F&& body) {
    CheckResult r;
    auto t0 = Clock::now();
    try {
        r = body();
    } catch (const resource_exceeded& e) {
        r.status = CheckStatus::resource_exceeded;
        r.detail = nlohmann::json{{"error", e.what()}};
    }
    r.name = std::move(name);
    r.wall_ms = ms_since(t0);
    return r;
}

// Execute independent tasks on `jobs` workers; results land at their task's
// index, so the output order never depends on scheduling.
std::vector<CheckResult> run_tasks(const std::vector<std::function<CheckResult()>>& tasks,
                                   int jobs) {
    std::vector<CheckResult> out(tasks.size());
    if (jobs <= 1 || tasks.size() <= 1) {
        for (size_t i = 0; i < tasks.size(); ++i) out[i] = tasks[i]();
        return out;
    }
    std::vector<std::exception_ptr> errors(tasks.size());
    std::atomic<size_t> next{0};
    auto worker = [&] {
        for (size_t i; (i = next.fetch_add(1)) < tasks.size();) {
            try {
                out[i] = tasks[i]();
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    size_t n = std::min<size_t>(static_cast<size_t>(jobs), tasks.size());
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (size_t j = 0; j < n; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

const std::string& sort_for_size(int size) {
    static const std::map<int, std::string> names = {{2, "A"}, {3, "B"}, {4, "E"}};
    auto it = names.find(size);
    if (it == names.end())
        throw invalid_input("axiom grids support carrier sizes 2..4, not " +
                            std::to_string(size));
    return it->second;
}

// All sort vectors of length 0..2 over the palette (uniform and mixed).
std::vector<std::vector<std::string>> vectors_up_to_2(const std::vector<std::string>& palette) {
    std::vector<std::vector<std::string>> out;
    out.push_back({});
    for (const auto& a : palette) out.push_back({a});
    for (const auto& a : palette)
        for (const auto& b : palette) out.push_back({a, b});
    return out;
}

std::vector<std::vector<int>> perms_of(size_t n) {
    std::vector<int> p(n);
    for (size_t i = 0; i < n; ++i) p[i] = static_cast<int>(i);
    std::vector<std::vector<int>> out;
    do out.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    return out;
}

std::string vec_name(const std::vector<std::string>& sorts) {
    if (sorts.empty()) return "-";
    std::string out;
    for (const auto& s : sorts) out += s;
    return out;
}

std::string perm_name(const std::vector<int>& pi) {
    if (pi.empty()) return "-";
    std::string out;
    for (int i : pi) out += static_cast<char>('0' + i);
    return out;
}

struct Instance {
    std::string name;
    FormulaPtr closed;
};

// Product of the carrier sizes over the free variables of the matrix under
// the leading universal prefix; the size of the team enumeration's ground
// row set. -1 for name sorts (no finite carrier).
long long matrix_carrier(const FormulaPtr& closed, const Signature& sig) {
    std::map<std::string, std::string> prefix;
    const Formula* f = closed.get();
    while (f->kind == FKind::Forall) {
        prefix[f->name] = f->sort_name;
        f = f->lhs.get();
    }
    long long prod = 1;
    for (const auto& v : free_vars(*f)) {
        auto it = prefix.find(v);
        if (it == prefix.end()) return -1;
        const SortDecl* decl = sig.find_sort(it->second);
        if (!decl || decl->kind != SortDecl::Kind::enumerated) return -1;
        prod *= decl->carrier->size();
        if (prod > (1LL << 40)) return prod;
    }
    return prod;
}

// ---------------------------------------------------------------------
// Axiom grids

void add_equiv_instances(std::vector<Instance>& out, const std::vector<std::string>& palette,
                         const std::string& battery_sort, bool with_relation) {
    auto vecs = vectors_up_to_2(palette);
    for (const char* id : {"equiv:A", "equiv:B", "equiv:C"})
        for (const auto& v : vecs) {
            SchemaArgs args;
            args.x_sorts = v;
            out.push_back({std::string(id) + " x=" + vec_name(v), instantiate_schema(id, args)});
        }
    for (const auto& v : vecs)
        for (const auto& pi : perms_of(v.size())) {
            SchemaArgs args;
            args.x_sorts = v;
            args.pi = pi;
            out.push_back({"equiv:D x=" + vec_name(v) + " pi=" + perm_name(pi),
                           instantiate_schema("equiv:D", args)});
        }
    for (const char* id : {"equiv:E", "equiv:G"})
        for (const auto& v : vecs)
            for (const auto& y : palette) {
                SchemaArgs args;
                args.x_sorts = v;
                args.y_sorts = {y};
                out.push_back({std::string(id) + " x=" + vec_name(v) + " y=" + y,
                               instantiate_schema(id, args)});
            }
    auto battery = phi_battery(battery_sort, with_relation);
    for (size_t i = 0; i < battery.size(); ++i) {
        SchemaArgs args;
        args.x_sorts = {battery_sort, battery_sort, battery_sort};
        args.phi = battery[i];
        args.phi_frame = phi_battery_frame();
        char name[32];
        std::snprintf(name, sizeof name, "equiv:F phi=%02zu", i + 1);
        out.push_back({name, instantiate_schema("equiv:F", args)});
    }
}

void add_indep_instances(std::vector<Instance>& out, const std::vector<std::string>& palette) {
    auto vecs = vectors_up_to_2(palette);
    auto uniform = [&](const std::string& s, int len) {
        return std::vector<std::string>(static_cast<size_t>(len), s);
    };
    // full permutation grid, uniform sorts
    for (const auto& s : palette)
        for (int lx = 0; lx <= 2; ++lx)
            for (int ly = 0; ly <= 2; ++ly)
                for (int lz = 0; lz <= 2; ++lz)
                    for (const auto& pix : perms_of(static_cast<size_t>(lx)))
                        for (const auto& piy : perms_of(static_cast<size_t>(ly)))
                            for (const auto& piz : perms_of(static_cast<size_t>(lz))) {
                                SchemaArgs args;
                                args.x_sorts = uniform(s, lx);
                                args.y_sorts = uniform(s, ly);
                                args.z_sorts = uniform(s, lz);
                                args.pi = pix;
                                args.pi_y = piy;
                                args.pi_z = piz;
                                out.push_back({"indep:P x=" + vec_name(args.x_sorts) +
                                                   " y=" + vec_name(args.y_sorts) +
                                                   " z=" + vec_name(args.z_sorts) + " pi=" +
                                                   perm_name(pix) + "/" + perm_name(piy) + "/" +
                                                   perm_name(piz),
                                               instantiate_schema("indep:P", args)});
                            }
    for (const auto& vx : vecs)
        for (const auto& vy : vecs) {
            SchemaArgs args;
            args.x_sorts = vx;
            args.y_sorts = vy;
            out.push_back({"indep:A x=" + vec_name(vx) + " y=" + vec_name(vy),
                           instantiate_schema("indep:A", args)});
        }
    for (const auto& s : palette)
        for (int lx = 0; lx <= 2; ++lx)
            for (int ly = 0; ly <= 2; ++ly)
                for (int lz = 0; lz <= 2; ++lz) {
                    SchemaArgs args;
                    args.x_sorts = uniform(s, lx);
                    args.y_sorts = uniform(s, ly);
                    args.z_sorts = uniform(s, lz);
                    out.push_back({"indep:B x=" + vec_name(args.x_sorts) +
                                       " y=" + vec_name(args.y_sorts) +
                                       " z=" + vec_name(args.z_sorts),
                                   instantiate_schema("indep:B", args)});
                }
    for (const char* id : {"indep:W", "indep:C", "indep:D"})
        for (const auto& s : palette)
            for (int lx = 0; lx <= 2; ++lx)
                for (int ly = 0; ly <= 2; ++ly)
                    for (int lz = 0; lz <= 2; ++lz)
                        for (int lw = 0; lw <= 2; ++lw) {
                            SchemaArgs args;
                            args.x_sorts = uniform(s, lx);
                            args.y_sorts = uniform(s, ly);
                            args.z_sorts = uniform(s, lz);
                            args.w_sorts = uniform(s, lw);
                            out.push_back({std::string(id) + " x=" + vec_name(args.x_sorts) +
                                               " y=" + vec_name(args.y_sorts) +
                                               " z=" + vec_name(args.z_sorts) +
                                               " w=" + vec_name(args.w_sorts),
                                           instantiate_schema(id, args)});
                        }
    for (const auto& s : palette)
        for (int lx = 0; lx <= 2; ++lx)
            for (int lz = 0; lz <= 2; ++lz)
                for (int lw = 0; lw <= 2; ++lw) {
                    SchemaArgs args;
                    args.x_sorts = uniform(s, lx);
                    args.z_sorts = uniform(s, lz);
                    args.w_sorts = uniform(s, lw);
                    out.push_back({"indep:Z x=" + vec_name(args.x_sorts) +
                                       " z=" + vec_name(args.z_sorts) +
                                       " w=" + vec_name(args.w_sorts),
                                   instantiate_schema("indep:Z", args)});
                }
    // mixed-sort spot instances
    if (palette.size() >= 2) {
        const std::string& a = palette[0];
        const std::string& b = palette[1];
        for (const auto& pix : perms_of(2)) {
            SchemaArgs args;
            args.x_sorts = {a, b};
            args.y_sorts = {b};
            args.z_sorts = {a};
            args.pi = pix;
            out.push_back({"indep:P x=" + a + b + " y=" + b + " z=" + a +
                               " pi=" + perm_name(pix) + "/0/0",
                           instantiate_schema("indep:P", args)});
        }
        SchemaArgs argsb;
        argsb.x_sorts = {a, b};
        argsb.y_sorts = {b};
        argsb.z_sorts = {a};
        out.push_back({"indep:B x=" + a + b + " y=" + b + " z=" + a,
                       instantiate_schema("indep:B", argsb)});
        for (const char* id : {"indep:W", "indep:C", "indep:D"}) {
            SchemaArgs args;
            args.x_sorts = {a};
            args.y_sorts = {b};
            args.z_sorts = {a, b};
            args.w_sorts = {b};
            out.push_back({std::string(id) + " x=" + a + " y=" + b + " z=" + a + b + " w=" + b,
                           instantiate_schema(id, args)});
        }
        SchemaArgs argsz;
        argsz.x_sorts = {a, b};
        argsz.z_sorts = {b};
        argsz.w_sorts = {a};
        out.push_back({"indep:Z x=" + a + b + " z=" + b + " w=" + a,
                       instantiate_schema("indep:Z", argsz)});
    }
}

void add_existence_preservation(std::vector<Instance>& out, const std::string& sort,
                                bool with_relation) {
    auto battery = phi_battery(sort, with_relation);
    for (size_t i = 0; i < battery.size(); ++i) {
        SchemaArgs args;
        args.x_sorts = {sort};
        args.y_sorts = {sort};
        args.w_sorts = {sort};
        args.phi = battery[i];
        args.phi_frame = phi_battery_frame();
        char name[48];
        std::snprintf(name, sizeof name, "existence-preservation phi=%02zu", i + 1);
        out.push_back({name, instantiate_schema("existence-preservation", args)});
    }
}

std::vector<Instance> multiteam_grid(const RunConfig& cfg, const Signature& sig) {
    std::vector<std::string> palette;
    for (int size : cfg.sort_sizes) palette.push_back(sort_for_size(size));
    std::vector<Instance> all;
    add_equiv_instances(all, palette, sort_for_size(2), true);
    add_indep_instances(all, palette);
    add_existence_preservation(all, sort_for_size(2), true);
    // Keep only instances whose ground row set fits the team budget, so
    // every emitted check completes at least one full enumeration tier.
    std::vector<Instance> out;
    for (auto& inst : all)
        if (matrix_carrier(inst.closed, sig) <= cfg.max_teams) out.push_back(std::move(inst));
    return out;
}

std::vector<Instance> schanuel_grid(const RunConfig&) {
    std::vector<Instance> out;
    add_equiv_instances(out, {"N"}, "N", false);
    add_indep_instances(out, {"N"});
    add_existence_preservation(out, "N", false);
    // spot instances over the pair-of-names sort
    {
        SchemaArgs args;
        args.x_sorts = {"P"};
        args.y_sorts = {"N"};
        out.push_back({"equiv:G x=P y=N", instantiate_schema("equiv:G", args)});
    }
    {
        SchemaArgs args;
        args.x_sorts = {"P"};
        args.y_sorts = {"N"};
        out.push_back({"indep:A x=P y=N", instantiate_schema("indep:A", args)});
    }
    {
        SchemaArgs args;
        args.x_sorts = {"P"};
        args.z_sorts = {"N"};
        args.w_sorts = {"P"};
        out.push_back({"indep:Z x=P z=N w=P", instantiate_schema("indep:Z", args)});
    }
    return out;
}

CheckResult verdict_check(const Verdict& v) {
    CheckResult r;
    r.cases = v.teams_checked;
    switch (v.status) {
        case Validity::valid: r.status = CheckStatus::pass; break;
        case Validity::invalid:
            r.status = CheckStatus::fail;
            r.detail = to_json(v);
            break;
        case Validity::resource_exceeded: r.status = CheckStatus::resource_exceeded; break;
    }
    return r;
}

nlohmann::json nominal_counterexample_json(const NominalVerdict& v) {
    nlohmann::json rho = nlohmann::json::object();
    for (const auto& b : v.counterexample) rho[b.var] = to_json(b.value);
    return nlohmann::json{{"world", v.world}, {"rho", std::move(rho)}};
}

CheckResult nominal_verdict_check(const NominalVerdict& v) {
    CheckResult r;
    r.cases = v.cases;
    if (v.valid) {
        r.status = CheckStatus::pass;
    } else {
        r.status = CheckStatus::fail;
        r.detail = nominal_counterexample_json(v);
    }
    return r;
}

// ---------------------------------------------------------------------
// Oracle differential

struct DiffOutcome {
    long long checked = 0;
    std::optional<nlohmann::json> divergence; // earliest by index
};

DiffOutcome diff_range(const std::vector<CorpusItem>& items, size_t begin, size_t end,
                       const Signature& sig) {
    DiffOutcome out;
    for (size_t i = begin; i < end; ++i) {
        const CorpusItem& item = items[i];
        bool by_oracle = force(item.rho, item.formula, sig);
        std::vector<std::pair<std::string, NondetVar>> rho(item.rho.bindings.begin(),
                                                           item.rho.bindings.end());
        Team team = team_of_assignment(item.rho.sample, rho);
        bool by_teams = eval(item.formula, team, sig);
        ++out.checked;
        if (by_oracle != by_teams) {
            out.divergence = nlohmann::json{{"index", i},
                                            {"item", to_json(item)},
                                            {"oracle", by_oracle},
                                            {"evaluator", by_teams}};
            return out;
        }
    }
    return out;
}

CheckResult diff_corpus(const std::vector<CorpusItem>& items, const Signature& sig, int jobs) {
    size_t chunk = std::max<size_t>(1, (items.size() + 7) / 8);
    std::vector<std::function<CheckResult()>> tasks;
    for (size_t begin = 0; begin < items.size(); begin += chunk) {
        size_t end = std::min(items.size(), begin + chunk);
        tasks.push_back([&items, begin, end, &sig] {
            DiffOutcome o = diff_range(items, begin, end, sig);
            CheckResult r;
            r.cases = o.checked;
            if (o.divergence) {
                r.status = CheckStatus::fail;
                r.detail = *o.divergence;
            }
            return r;
        });
    }
    auto parts = run_tasks(tasks, jobs);
    CheckResult merged;
    for (const auto& p : parts) {
        merged.cases += p.cases;
        if (merged.status == CheckStatus::pass && p.status != CheckStatus::pass) {
            merged.status = p.status;
            merged.detail = p.detail;
        }
    }
    return merged;
}

nlohmann::json corpus_profile(const std::vector<CorpusItem>& items) {
    auto depth = [](const FormulaPtr& f) {
        auto rec = [](const auto& self, const Formula& g) -> int {
            int d = 0;
            if (g.lhs) d = std::max(d, self(self, *g.lhs));
            if (g.rhs) d = std::max(d, self(self, *g.rhs));
            return d + (g.kind == FKind::Exists || g.kind == FKind::Forall ? 1 : 0);
        };
        return rec(rec, *f);
    };
    std::map<int, long long> by_depth, by_sample;
    for (const auto& item : items) {
        ++by_depth[depth(item.formula)];
        ++by_sample[item.rho.sample.size];
    }
    nlohmann::json jd = nlohmann::json::object(), js = nlohmann::json::object();
    for (auto& [d, n] : by_depth) jd[std::to_string(d)] = n;
    for (auto& [s, n] : by_sample) js[std::to_string(s)] = n;
    return nlohmann::json{{"by_quantifier_depth", std::move(jd)},
                          {"by_sample_size", std::move(js)}};
}

// ---------------------------------------------------------------------
// Category checks

void append_axiom_report(std::vector<CheckResult>& out, const std::string& prefix,
                         const AxiomReport& rep, double wall_ms) {
    for (const auto& c : rep.checks) {
        CheckResult r;
        r.name = prefix + c.name;
        r.status = c.pass ? CheckStatus::pass : CheckStatus::fail;
        r.cases = c.cases;
        if (!c.counterexample.empty()) r.detail = nlohmann::json{{"witness", c.counterexample}};
        r.wall_ms = wall_ms / static_cast<double>(rep.checks.size());
        out.push_back(std::move(r));
    }
}

// The sheaf of sort-valued variables turns every independent square into a
// pullback of sets: for each matching pair of variables on the square's
// sides there is exactly one variable on the base restricting to both.
// (Uniqueness is automatic — w . r = y pins w on the image of the
// surjection r — so the check verifies existence and verifies the
// constructed witness.)
CheckResult nv_pullback_check(int size_bound, int sort_bound) {
    CheckResult r;
    auto compose_vals = [](const std::vector<int>& vals, const FinSurjection& f) {
        std::vector<int> out(static_cast<size_t>(f.dom.size));
        for (int i = 0; i < f.dom.size; ++i) out[static_cast<size_t>(i)] = vals[static_cast<size_t>(f(i))];
        return out;
    };
    auto all_vectors = [](int len, int alphabet) {
        std::vector<std::vector<int>> out;
        std::vector<int> cur(static_cast<size_t>(len), 0);
        for (;;) {
            out.push_back(cur);
            int i = len - 1;
            while (i >= 0 && cur[static_cast<size_t>(i)] == alphabet - 1) cur[static_cast<size_t>(i--)] = 0;
            if (i < 0) break;
            ++cur[static_cast<size_t>(i)];
        }
        return out;
    };
    for (int wsz = 1; wsz <= size_bound; ++wsz)
        for (int ysz = wsz; ysz <= size_bound; ++ysz)
            for (int zsz = wsz; zsz <= size_bound; ++zsz)
                for (const auto& rmap : all_surjections(FinSet(ysz), FinSet(wsz)))
                    for (const auto& smap : all_surjections(FinSet(zsz), FinSet(wsz)))
                        for (int xsz = std::max(ysz, zsz); xsz <= size_bound; ++xsz)
                            for (const auto& p : all_surjections(FinSet(xsz), FinSet(ysz)))
                                for (const auto& q : all_surjections(FinSet(xsz), FinSet(zsz))) {
                                    if (!(compose(p, rmap) == compose(q, smap))) continue;
                                    CommutingSquare sq(p, q, rmap, smap);
                                    if (!is_independent_square(sq)) continue;
                                    for (int a = 1; a <= sort_bound; ++a) {
                                        for (const auto& yv : all_vectors(ysz, a)) {
                                            auto xv = compose_vals(yv, p);
                                            for (const auto& zv : all_vectors(zsz, a)) {
                                                if (compose_vals(zv, q) != xv) continue;
                                                ++r.cases;
                                                // construct w through a section of r
                                                std::vector<int> wv(static_cast<size_t>(wsz), -1);
                                                for (int yy = 0; yy < ysz; ++yy)
                                                    if (wv[static_cast<size_t>(rmap(yy))] < 0)
                                                        wv[static_cast<size_t>(rmap(yy))] =
                                                            yv[static_cast<size_t>(yy)];
                                                bool ok = compose_vals(wv, rmap) == yv &&
                                                          compose_vals(wv, smap) == zv;
                                                if (!ok) {
                                                    r.status = CheckStatus::fail;
                                                    r.detail = nlohmann::json{
                                                        {"square",
                                                         {{"p", p.map}, {"q", q.map},
                                                          {"r", rmap.map}, {"s", smap.map}}},
                                                        {"sort_size", a},
                                                        {"side_y", yv},
                                                        {"side_z", zv}};
                                                    return r;
                                                }
                                            }
                                        }
                                    }
                                }
    return r;
}

// Restricting a variable and then taking its canonical support yields the
// same injective core: the support map composed with the restriction is
// again a support for the restricted variable.
CheckResult support_stability_check(int bound) {
    CheckResult r;
    for (int a = 1; a <= bound; ++a) {
        std::vector<std::string> atoms;
        for (int i = 0; i < a; ++i) atoms.push_back("v" + std::to_string(i));
        auto sort = std::make_shared<const SortValueSet>("S" + std::to_string(a), atoms);
        for (int n = 1; n <= bound; ++n) {
            std::vector<int> vals(static_cast<size_t>(n), 0);
            for (;;) {
                NondetVar x(FinSet(n), sort, vals);
                SupportResult sup = support(x);
                for (int n2 = n; n2 <= bound + 1; ++n2)
                    for (const auto& q : all_surjections(FinSet(n2), FinSet(n))) {
                        ++r.cases;
                        NondetVar restricted = restrict_var(x, q);
                        FinSurjection through = compose(q, sup.p);
                        if (!(restrict_var(sup.xs, through) == restricted) ||
                            static_cast<int>(sup.xs.image().size()) != sup.sample_s.size) {
                            r.status = CheckStatus::fail;
                            r.detail = nlohmann::json{{"values", x.values},
                                                      {"restriction", q.map}};
                            return r;
                        }
                    }
                int i = n - 1;
                while (i >= 0 && vals[static_cast<size_t>(i)] == a - 1) vals[static_cast<size_t>(i--)] = 0;
                if (i < 0) break;
                ++vals[static_cast<size_t>(i)];
            }
        }
    }
    return r;
}

// ---------------------------------------------------------------------
// Single-formula helpers

Context file_context(const ParsedFormulaFile& file, const Signature& sig) {
    Context ctx;
    for (const auto& [v, s] : file.vars) ctx.push(v, s);
    if (sig.sorts.empty()) throw invalid_input("signature declares no sorts");
    const std::string& fallback = sig.sorts.front().name;
    for (const auto& v : free_vars(*file.formula))
        if (ctx.index_of(v) < 0) ctx.push(v, fallback);
    return ctx;
}

void collect_atoms(const FormulaPtr& f, std::vector<FormulaPtr>& out) {
    switch (f->kind) {
        case FKind::Eq:
        case FKind::Equiv:
        case FKind::Indep:
        case FKind::Rel: out.push_back(f); return;
        case FKind::Not:
        case FKind::Exists:
        case FKind::Forall: collect_atoms(f->lhs, out); return;
        case FKind::And:
        case FKind::Or:
        case FKind::Implies:
            collect_atoms(f->lhs, out);
            collect_atoms(f->rhs, out);
            return;
    }
}

// Truth of every atom whose variables are all bound at the top level;
// atoms under quantifiers that use the bound variable are skipped.
template <class EvalAtom>
nlohmann::json atom_trace(const FormulaPtr& f, const std::vector<std::string>& bound,
                          EvalAtom&& eval_atom) {
    std::vector<FormulaPtr> atoms;
    collect_atoms(f, atoms);
    std::set<std::string> have(bound.begin(), bound.end());
    nlohmann::json out = nlohmann::json::array();
    std::set<std::string> seen;
    for (const auto& atom : atoms) {
        std::string text = print_formula(atom);
        if (!seen.insert(text).second) continue;
        bool closed = true;
        for (const auto& v : free_vars(*atom)) closed = closed && have.count(v);
        if (!closed) continue;
        out.push_back({{"atom", text}, {"value", eval_atom(atom)}});
    }
    return out;
}

std::vector<NominalBinding> nominal_instance(const nlohmann::json& instance, const Context& ctx) {
    if (!instance.is_object() || !instance.contains("world") || !instance.contains("rho"))
        throw invalid_input("world assignment: expected {\"world\": n, \"rho\": {...}}");
    int world = instance.at("world").get<int>();
    std::vector<NominalBinding> rho;
    for (const auto& [var, val] : instance.at("rho").items()) {
        int idx = ctx.index_of(var);
        if (idx < 0) throw invalid_input("world assignment binds undeclared variable '" + var + "'");
        NameTuple t{NameSet(world), val.get<std::vector<int>>()};
        t.validate();
        rho.push_back({var, ctx.vars[static_cast<size_t>(idx)].second, std::move(t)});
    }
    return rho;
}

} // namespace

void RunConfig::validate() const {
    if (model != "multiteam" && model != "schanuel")
        throw invalid_input("model must be 'multiteam' or 'schanuel', not '" + model + "'");
    if (sort_sizes.empty()) throw invalid_input("sort_sizes must not be empty");
    for (int s : sort_sizes) sort_for_size(s); // throws outside 2..4
    if (world_bound < 0) throw invalid_input("world_bound must be nonnegative");
    if (max_teams < 1) throw invalid_input("max_teams must be positive");
    if (category_bound < 1 || category_bound > 4)
        throw invalid_input("category_bound must be between 1 and 4");
    if (corpus_count < 0 || metamorphic_count < 0)
        throw invalid_input("corpus counts must be nonnegative");
    if (jobs < 1) throw invalid_input("jobs must be positive");
}

nlohmann::json RunConfig::to_json() const {
    return {{"model", model},
            {"sort_sizes", sort_sizes},
            {"world_bound", world_bound},
            {"max_teams", max_teams},
            {"category_bound", category_bound},
            {"corpus_count", corpus_count},
            {"metamorphic_count", metamorphic_count},
            {"seed", seed},
            {"jobs", jobs}};
}

const Signature& default_signature(const std::string& model) {
    if (model == "schanuel") {
        static const Signature sig = parse_signature("sort N = names(1)\n"
                                                     "sort P = names(2)\n");
        return sig;
    }
    static const Signature sig = parse_signature("sort A = {a, b}\n"
                                                 "sort B = 3\n"
                                                 "sort C = {c, d}\n"
                                                 "sort E = 4\n"
                                                 "rel D = diamond A {a}\n");
    return sig;
}

const std::vector<std::string>& phi_battery_frame() {
    static const std::vector<std::string> frame = {"p", "q", "r"};
    return frame;
}

std::vector<FormulaPtr> phi_battery(const std::string& sort_name, bool with_relation) {
    const std::string& s = sort_name;
    std::vector<std::string> texts = {
        "eq(p, q)",
        "equiv(p ; q)",
        "equiv(p,r ; q,r)",
        "indep(p ; q | r)",
        "indep(p ; q | )",
        "not eq(p, r)",
        "eq(p, q) and equiv(q ; r)",
        "equiv(p ; q) or indep(p ; r | q)",
        "indep(p ; q | r) -> equiv(p ; q)",
        "exists u:" + s + ". (eq(u, p) and indep(u ; q | r))",
        "forall u:" + s + ". (equiv(u ; p) -> indep(u ; q | r))",
        with_relation ? "D(p) and not eq(q, r)" : "indep(p,q ; r | ) -> indep(p ; r | q)",
    };
    std::vector<FormulaPtr> out;
    for (const auto& t : texts) out.push_back(parse_formula(t));
    return out;
}

SuiteReport run_axioms(const RunConfig& cfg) {
    cfg.validate();
    SuiteReport report;
    report.suite = "axioms";
    report.config = cfg.to_json();
    const Signature& sig = default_signature(cfg.model);
    std::vector<std::function<CheckResult()>> tasks;
    if (cfg.model == "multiteam") {
        auto grid = multiteam_grid(cfg, sig);
        for (auto& inst : grid)
            tasks.push_back([inst, &sig, &cfg] {
                return timed_check(inst.name, [&] {
                    EvalOptions opts;
                    opts.max_teams = cfg.max_teams;
                    return verdict_check(valid(inst.closed, Context{}, sig, opts));
                });
            });
        tasks.push_back([&sig, &cfg] {
            return timed_check("negative-control", [&] {
                EvalOptions opts;
                opts.max_teams = cfg.max_teams;
                Verdict v = valid(parse_formula("forall x:A. forall y:C. indep(x ; y | )"),
                                  Context{}, sig, opts);
                CheckResult r;
                r.cases = v.teams_checked;
                // the control must be refuted, with the countermodel shown
                if (v.status == Validity::invalid && v.countermodel) {
                    r.detail = nlohmann::json{{"countermodel", to_json(*v.countermodel)}};
                } else {
                    r.status = CheckStatus::fail;
                    r.detail = nlohmann::json{{"verdict", to_string(v.status)}};
                }
                return r;
            });
        });
    } else {
        auto grid = schanuel_grid(cfg);
        for (auto& inst : grid)
            tasks.push_back([inst, &sig, &cfg] {
                return timed_check(inst.name, [&] {
                    return nominal_verdict_check(
                        valid_nominal(inst.closed, Context{}, sig, cfg.world_bound));
                });
            });
        tasks.push_back([&sig, &cfg] {
            return timed_check("negative-control", [&] {
                NominalVerdict v =
                    valid_nominal(parse_formula("forall x:N. forall y:N. indep(x ; y | )"),
                                  Context{}, sig, cfg.world_bound);
                CheckResult r;
                r.cases = v.cases;
                if (!v.valid) {
                    r.detail = nlohmann::json{{"world", v.world}};
                } else {
                    r.status = CheckStatus::fail;
                }
                return r;
            });
        });
    }
    report.checks = run_tasks(tasks, cfg.jobs);
    return report;
}

SuiteReport run_oracle_diff(const RunConfig& cfg) {
    cfg.validate();
    SuiteReport report;
    report.suite = "oracle-diff";
    report.config = cfg.to_json();
    const Signature& sig = corpus_signature();

    CorpusOptions main_opts;
    main_opts.count = cfg.corpus_count;
    auto items = make_corpus(cfg.seed, main_opts);

    {
        auto t0 = Clock::now();
        CheckResult r = diff_corpus(items, sig, cfg.jobs);
        r.name = "corpus-agreement";
        r.wall_ms = ms_since(t0);
        report.checks.push_back(std::move(r));
    }
    {
        CheckResult r;
        r.name = "corpus-profile";
        r.cases = static_cast<long long>(items.size());
        r.detail = corpus_profile(items);
        report.checks.push_back(std::move(r));
    }
    {
        auto t0 = Clock::now();
        CorpusOptions qf_opts;
        qf_opts.count = std::min(cfg.corpus_count, 200);
        qf_opts.max_depth = 0;
        auto qf = make_corpus(cfg.seed ^ 0x9e3779b97f4a7c15ULL, qf_opts);
        CheckResult r = diff_corpus(qf, sig, cfg.jobs);
        r.name = "quantifier-free-agreement";
        r.wall_ms = ms_since(t0);
        report.checks.push_back(std::move(r));
    }
    report.checks.push_back(timed_check("bound-stability", [&] {
        // Re-force with a doubled quantifier witness bound wherever the
        // doubled run stays within budget; the verdict must not move.
        CheckResult r;
        ForceOptions doubled;
        doubled.bound_factor = 2;
        for (size_t i = 0; i < items.size(); ++i) {
            const CorpusItem& item = items[i];
            if (estimate_force_cost(item.formula, item.rho.sample.size, sig, 2) >
                8 * CorpusOptions{}.max_force_cost)
                continue;
            ++r.cases;
            bool base = force(item.rho, item.formula, sig);
            bool wide = force(item.rho, item.formula, sig, doubled);
            if (base != wide) {
                r.status = CheckStatus::fail;
                r.detail = nlohmann::json{{"index", i},
                                          {"item", to_json(item)},
                                          {"base", base},
                                          {"doubled", wide}};
                return r;
            }
        }
        return r;
    }));
    return report;
}

SuiteReport run_category(const RunConfig& cfg) {
    cfg.validate();
    SuiteReport report;
    report.suite = "category";
    report.config = cfg.to_json();
    {
        auto t0 = Clock::now();
        AxiomReport rep = check_ip_axioms(cfg.category_bound);
        append_axiom_report(report.checks, "sur/", rep, ms_since(t0));
    }
    {
        auto t0 = Clock::now();
        AxiomReport rep = check_ip_axioms_nominal(cfg.category_bound);
        append_axiom_report(report.checks, "iop/", rep, ms_since(t0));
    }
    report.checks.push_back(timed_check("nv-pullback", [&] {
        return nv_pullback_check(cfg.category_bound, cfg.category_bound);
    }));
    for (SubsheafRelation rel :
         {SubsheafRelation::equiextension, SubsheafRelation::cond_indep, SubsheafRelation::box,
          SubsheafRelation::diamond}) {
        auto t0 = Clock::now();
        AxiomReport rep = check_subsheaf_closure(rel, cfg.category_bound);
        append_axiom_report(report.checks, std::string("subsheaf/") + to_string(rel) + "/", rep,
                            ms_since(t0));
    }
    return report;
}

SuiteReport run_metamorphic(const RunConfig& cfg) {
    cfg.validate();
    SuiteReport report;
    report.suite = "metamorphic";
    report.config = cfg.to_json();
    const Signature& sig = corpus_signature();

    CorpusOptions opts;
    opts.count = cfg.metamorphic_count;
    auto items = make_corpus(cfg.seed, opts);

    // Pre-draw one restriction per item from a deterministic stream: an
    // extension of the sample by one point where the oracle budget allows,
    // a permutation otherwise.
    std::mt19937_64 rng(cfg.seed * 0x9e3779b97f4a7c15ULL + 0x7f4a7c15ULL);
    auto draw_below = [&rng](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
    std::vector<FinSurjection> restrictions;
    restrictions.reserve(items.size());
    for (const auto& item : items) {
        int n = item.rho.sample.size;
        std::vector<int> ext(static_cast<size_t>(n) + 1);
        for (int i = 0; i < n; ++i) ext[static_cast<size_t>(i)] = i;
        ext[static_cast<size_t>(n)] = draw_below(n);
        int t1 = draw_below(n + 1);
        int t2 = draw_below(n + 1);
        std::swap(ext[static_cast<size_t>(t1)], ext[static_cast<size_t>(t2)]);
        if (estimate_force_cost(item.formula, n + 1, sig) <= opts.max_force_cost) {
            restrictions.emplace_back(FinSet(n + 1), FinSet(n), std::move(ext));
        } else {
            std::vector<int> perm(static_cast<size_t>(n));
            for (int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = i;
            for (int i = n - 1; i > 0; --i)
                std::swap(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(draw_below(i + 1))]);
            restrictions.emplace_back(FinSet(n), FinSet(n), std::move(perm));
        }
    }

    {
        auto t0 = Clock::now();
        size_t chunk = std::max<size_t>(1, (items.size() + 7) / 8);
        std::vector<std::function<CheckResult()>> tasks;
        for (size_t begin = 0; begin < items.size(); begin += chunk) {
            size_t end = std::min(items.size(), begin + chunk);
            tasks.push_back([&, begin, end] {
                CheckResult r;
                for (size_t i = begin; i < end; ++i) {
                    ++r.cases;
                    if (!metamorphic_check(items[i].rho, items[i].formula, restrictions[i], sig)) {
                        r.status = CheckStatus::fail;
                        r.detail = nlohmann::json{{"index", i},
                                                  {"item", to_json(items[i])},
                                                  {"restriction", restrictions[i].map}};
                        return r;
                    }
                }
                return r;
            });
        }
        auto parts = run_tasks(tasks, cfg.jobs);
        CheckResult merged;
        for (const auto& p : parts) {
            merged.cases += p.cases;
            if (merged.status == CheckStatus::pass && p.status != CheckStatus::pass) {
                merged.status = p.status;
                merged.detail = p.detail;
            }
        }
        merged.name = "restriction-locality";
        merged.wall_ms = ms_since(t0);
        report.checks.push_back(std::move(merged));
    }
    report.checks.push_back(
        timed_check("support-stability", [&] { return support_stability_check(3); }));
    return report;
}

SuiteReport run_check(const RunConfig& cfg, const Signature& sig, const ParsedFormulaFile& file) {
    cfg.validate();
    SuiteReport report;
    report.suite = "check";
    report.config = cfg.to_json();
    Context ctx = file_context(file, sig);
    report.checks.push_back(timed_check("valid", [&] {
        if (cfg.model == "schanuel")
            return nominal_verdict_check(valid_nominal(file.formula, ctx, sig, cfg.world_bound));
        EvalOptions opts;
        opts.max_teams = cfg.max_teams;
        Verdict v = valid(file.formula, ctx, sig, opts);
        CheckResult r = verdict_check(v);
        if (r.status == CheckStatus::pass)
            r.detail = nlohmann::json{{"exhaustive", v.exhaustive},
                                      {"max_rows_checked", v.max_rows_checked}};
        return r;
    }));
    return report;
}

SuiteReport run_eval(const RunConfig& cfg, const Signature& sig, const ParsedFormulaFile& file,
                     const nlohmann::json& instance) {
    cfg.validate();
    SuiteReport report;
    report.suite = "eval";
    report.config = cfg.to_json();
    report.checks.push_back(timed_check("eval", [&] {
        CheckResult r;
        if (cfg.model == "schanuel") {
            Context ctx = file_context(file, sig);
            auto rho = nominal_instance(instance, ctx);
            if (!instance.contains("world"))
                throw invalid_input("world assignment: missing 'world'");
            NameSet world(instance.at("world").get<int>());
            bool verdict = eval_nominal(file.formula, world, rho, sig);
            r.cases = 1;
            r.status = verdict ? CheckStatus::pass : CheckStatus::fail;
            if (!verdict) {
                std::vector<std::string> bound;
                for (const auto& b : rho) bound.push_back(b.var);
                r.detail = nlohmann::json{
                    {"verdict", false},
                    {"atoms", atom_trace(file.formula, bound, [&](const FormulaPtr& atom) {
                         return eval_nominal(atom, world, rho, sig);
                     })}};
            }
            return r;
        }
        Team team = team_from_json(instance, sig);
        EvalOptions opts;
        opts.max_teams = cfg.max_teams;
        bool verdict = eval(file.formula, team, sig, opts);
        r.cases = 1;
        r.status = verdict ? CheckStatus::pass : CheckStatus::fail;
        if (!verdict) {
            std::vector<std::string> bound;
            for (const auto& [v, s] : team.context.vars) bound.push_back(v);
            r.detail =
                nlohmann::json{{"verdict", false},
                               {"atoms", atom_trace(file.formula, bound, [&](const FormulaPtr& atom) {
                                    return eval(atom, team, sig, opts);
                                })}};
        }
        return r;
    }));
    return report;
}

} // namespace sheaflogic
