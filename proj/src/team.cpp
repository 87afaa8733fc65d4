// Team semantics: teams as joint images of assignments, formula evaluation
// over teams, and bounded validity search with canonical countermodels.

#include "sheaflogic/team.hpp"

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <map>
#include <optional>
#include <set>
#include <unordered_map>

#include "sheaflogic/errors.hpp"

namespace sheaflogic {

namespace {

constexpr long long kHuge = 1LL << 62;

long long clamped_pow(long long b, long long e) {
    long long r = 1;
    for (long long i = 0; i < e; ++i) {
        if (r > kHuge / std::max<long long>(b, 1)) return kHuge;
        r *= b;
    }
    return r;
}

// C(n, k), clamped well above any usable budget.
long long clamped_binom(long long n, long long k) {
    if (k < 0 || k > n) return 0;
    k = std::min(k, n - k);
    __int128 r = 1;
    for (long long i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i; // integral at every step
        if (r > static_cast<__int128>(kHuge)) return kHuge;
    }
    return static_cast<long long>(r);
}

std::vector<std::vector<int>> dedup_rows(std::vector<std::vector<int>> rows) {
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    return rows;
}

} // namespace

void Team::validate() const {
    if (context.vars.size() != carriers.size())
        throw invalid_input("Team: context and carrier lists differ in length");
    for (size_t i = 0; i < context.vars.size(); ++i) {
        for (size_t j = i + 1; j < context.vars.size(); ++j)
            if (context.vars[i].first == context.vars[j].first)
                throw invalid_input("Team: duplicate variable '" + context.vars[i].first + "'");
        if (!carriers[i]) throw invalid_input("Team: missing carrier");
        carriers[i]->validate();
        if (carriers[i]->name != context.vars[i].second)
            throw invalid_input("Team: carrier '" + carriers[i]->name +
                                "' bound to variable of sort '" + context.vars[i].second + "'");
    }
    if (rows.empty()) throw invalid_input("Team: a team has at least one row");
    const size_t w = context.vars.size();
    for (const auto& row : rows) {
        if (row.size() != w) throw invalid_input("Team: row width differs from context width");
        for (size_t c = 0; c < w; ++c)
            if (row[c] < 0 || row[c] >= carriers[c]->size())
                throw invalid_input("Team: entry out of range for sort '" + carriers[c]->name + "'");
    }
    for (size_t i = 0; i + 1 < rows.size(); ++i)
        if (!(rows[i] < rows[i + 1]))
            throw invalid_input("Team: rows must be strictly increasing");
}

Team team_of_assignment(const FinSet& omega,
                        const std::vector<std::pair<std::string, NondetVar>>& rho) {
    Team t;
    for (const auto& [name, var] : rho) {
        if (!(var.sample == omega))
            throw invalid_input("team_of_assignment: variable '" + name +
                                "' lives on a different sample set");
        t.context.vars.emplace_back(name, var.sort->name);
        t.carriers.push_back(var.sort);
    }
    std::vector<std::vector<int>> rows;
    rows.reserve(static_cast<size_t>(omega.size));
    for (int w = 0; w < omega.size; ++w) {
        std::vector<int> row;
        row.reserve(rho.size());
        for (const auto& [name, var] : rho) row.push_back(var(w));
        rows.push_back(std::move(row));
    }
    t.rows = dedup_rows(std::move(rows));
    t.validate();
    return t;
}

Team project(const Team& team, const std::vector<std::string>& vars) {
    std::vector<int> cols;
    cols.reserve(vars.size());
    for (const auto& v : vars) {
        int c = team.context.index_of(v);
        if (c < 0) throw invalid_input("project: variable '" + v + "' not in the team");
        if (std::find(cols.begin(), cols.end(), c) != cols.end())
            throw invalid_input("project: variable '" + v + "' requested twice");
        cols.push_back(c);
    }
    Team out;
    for (int c : cols) {
        out.context.vars.push_back(team.context.vars[static_cast<size_t>(c)]);
        out.carriers.push_back(team.carriers[static_cast<size_t>(c)]);
    }
    std::vector<std::vector<int>> rows;
    rows.reserve(team.rows.size());
    for (const auto& row : team.rows) {
        std::vector<int> r(cols.size());
        for (size_t i = 0; i < cols.size(); ++i) r[i] = row[static_cast<size_t>(cols[i])];
        rows.push_back(std::move(r));
    }
    out.rows = dedup_rows(std::move(rows));
    return out;
}

const char* to_string(Validity v) {
    switch (v) {
        case Validity::valid: return "valid";
        case Validity::invalid: return "invalid";
        case Validity::resource_exceeded: return "resource-exceeded";
    }
    return "?";
}

namespace {

// A deterministic witness candidate for a block of quantified variables:
// every new column j takes, at each existing row s, the values row[src[j]]
// (or the constant -src[j]-1) over all rows r that match s on the listed
// diagonal columns and cross pairs (r[a] == s[b]). full_diag restricts to
// r == s, i.e. a plain componentwise copy.
struct HintDesc {
    std::vector<int> src;
    bool full_diag = false;
    std::vector<int> diag;
    std::vector<std::pair<int, int>> cross;
};

class Evaluator {
public:
    Evaluator(const Signature& sig, const EvalOptions& opts) : sig_(sig), opts_(opts) {}

    bool run(const FormulaPtr& f, const Team& team);

private:
    const Signature& sig_;
    EvalOptions opts_;
    std::unordered_map<std::string, bool> memo_;
    std::map<const Formula*, std::vector<std::string>> fv_cache_;
    std::map<const Formula*, HintDesc> hint_cache_;

    const std::vector<std::string>& fv(const Formula& f) {
        auto it = fv_cache_.find(&f);
        if (it == fv_cache_.end()) it = fv_cache_.emplace(&f, free_vars(f)).first;
        return it->second;
    }

    static int column(const Team& t, const std::string& name) {
        int c = t.context.index_of(name);
        if (c < 0) throw invalid_input("eval: unbound variable '" + name + "'");
        return c;
    }

    bool dispatch(const FormulaPtr& f, const Team& team);
    bool eval_eq(const Formula& f, const Team& t);
    bool eval_equiv(const Formula& f, const Team& t);
    bool eval_indep(const Formula& f, const Team& t);
    bool eval_rel(const Formula& f, const Team& t);
    bool eval_quant_block(const FormulaPtr& f, const Team& team);
    bool eval_quant_single(const FormulaPtr& f, const Team& team);

    Team quantifier_base(const Team& team, const std::vector<std::string>& bound) const;
    static Team extend_one(const Team& base, const std::string& var, const SortPtr& carrier,
                           const std::vector<std::vector<int>>& cells);
    std::optional<Team> build_hint(const Team& base, const std::vector<std::string>& vars,
                                   const std::vector<SortPtr>& carriers, const HintDesc& d) const;
    template <class Fn>
    void enumerate_hints(const Team& base, const std::vector<SortPtr>& carriers, Fn&& fn) const;
};

bool Evaluator::run(const FormulaPtr& f, const Team& team) {
    switch (f->kind) {
        case FKind::Eq: return eval_eq(*f, team);
        case FKind::Rel: return eval_rel(*f, team);
        case FKind::Not: return !run(f->lhs, team);
        case FKind::And: return run(f->lhs, team) && run(f->rhs, team);
        case FKind::Or: return run(f->lhs, team) || run(f->rhs, team);
        case FKind::Implies: return !run(f->lhs, team) || run(f->rhs, team);
        default: break;
    }

    // The remaining kinds are worth memoizing. Truth is local to the free
    // variables, so the key is the node plus the projected row set (and the
    // free variables' sorts, which binders may vary).
    const auto& vars = fv(*f);
    std::vector<int> cols;
    cols.reserve(vars.size());
    std::string key;
    const Formula* node = f.get();
    key.append(reinterpret_cast<const char*>(&node), sizeof(node));
    for (const auto& v : vars) {
        int c = column(team, v);
        cols.push_back(c);
        key += team.context.vars[static_cast<size_t>(c)].second;
        key += '\x1f';
    }
    std::set<std::vector<int>> proj;
    {
        std::vector<int> r(cols.size());
        for (const auto& row : team.rows) {
            for (size_t i = 0; i < cols.size(); ++i) r[i] = row[static_cast<size_t>(cols[i])];
            proj.insert(r);
        }
    }
    for (const auto& row : proj)
        for (int v : row) key.append(reinterpret_cast<const char*>(&v), sizeof(int));

    if (auto it = memo_.find(key); it != memo_.end()) return it->second;

    bool value = dispatch(f, team);
    if (memo_.size() >= opts_.memo_limit) memo_.clear();
    memo_.emplace(std::move(key), value);
    return value;
}

bool Evaluator::dispatch(const FormulaPtr& f, const Team& team) {
    switch (f->kind) {
        case FKind::Equiv: return eval_equiv(*f, team);
        case FKind::Indep: return eval_indep(*f, team);
        case FKind::Exists:
        case FKind::Forall: return eval_quant_block(f, team);
        default: throw invalid_input("eval: unexpected formula node");
    }
}

bool Evaluator::eval_eq(const Formula& f, const Team& t) {
    int cx = column(t, f.xs[0]), cy = column(t, f.xs[1]);
    for (const auto& row : t.rows)
        if (row[static_cast<size_t>(cx)] != row[static_cast<size_t>(cy)]) return false;
    return true;
}

bool Evaluator::eval_equiv(const Formula& f, const Team& t) {
    const size_t n = f.xs.size();
    std::vector<int> cx(n), cy(n);
    for (size_t i = 0; i < n; ++i) {
        cx[i] = column(t, f.xs[i]);
        cy[i] = column(t, f.ys[i]);
    }
    std::vector<std::vector<int>> lhs, rhs;
    lhs.reserve(t.rows.size());
    rhs.reserve(t.rows.size());
    for (const auto& row : t.rows) {
        std::vector<int> l(n), r(n);
        for (size_t i = 0; i < n; ++i) {
            l[i] = row[static_cast<size_t>(cx[i])];
            r[i] = row[static_cast<size_t>(cy[i])];
        }
        lhs.push_back(std::move(l));
        rhs.push_back(std::move(r));
    }
    return dedup_rows(std::move(lhs)) == dedup_rows(std::move(rhs));
}

bool Evaluator::eval_indep(const Formula& f, const Team& t) {
    std::vector<int> cx, cy, cz;
    for (const auto& v : f.xs) cx.push_back(column(t, v));
    for (const auto& v : f.ys) cy.push_back(column(t, v));
    for (const auto& v : f.zs) cz.push_back(column(t, v));
    const auto& rows = t.rows;
    const size_t m = rows.size();
    auto agree = [](const std::vector<int>& a, const std::vector<int>& b,
                    const std::vector<int>& cols) {
        for (int c : cols)
            if (a[static_cast<size_t>(c)] != b[static_cast<size_t>(c)]) return false;
        return true;
    };
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = 0; j < m; ++j) {
            if (!agree(rows[i], rows[j], cz)) continue;
            bool found = false;
            for (size_t w = 0; w < m && !found; ++w)
                found = agree(rows[w], rows[i], cx) && agree(rows[w], rows[j], cy) &&
                        agree(rows[w], rows[i], cz);
            if (!found) return false;
        }
    }
    return true;
}

bool Evaluator::eval_rel(const Formula& f, const Team& t) {
    const RelationDecl* decl = sig_.find_relation(f.name);
    if (!decl) throw invalid_input("eval: unknown relation '" + f.name + "'");
    int c = column(t, f.xs[0]);
    const SortPtr& carrier = t.carriers[static_cast<size_t>(c)];
    std::vector<char> member(static_cast<size_t>(carrier->size()), 0);
    for (const auto& a : decl->atoms) {
        int idx = carrier->index_of(a);
        if (idx < 0)
            throw invalid_input("eval: relation '" + f.name + "' mentions '" + a +
                                "', not in sort '" + carrier->name + "'");
        member[static_cast<size_t>(idx)] = 1;
    }
    if (decl->mode == RelationDecl::Mode::box) {
        for (const auto& row : t.rows)
            if (!member[static_cast<size_t>(row[static_cast<size_t>(c)])]) return false;
        return true;
    }
    for (const auto& row : t.rows)
        if (member[static_cast<size_t>(row[static_cast<size_t>(c)])]) return true;
    return false;
}

Team Evaluator::quantifier_base(const Team& team, const std::vector<std::string>& bound) const {
    std::vector<std::string> keep;
    for (const auto& [name, sort] : team.context.vars)
        if (std::find(bound.begin(), bound.end(), name) == bound.end()) keep.push_back(name);
    if (keep.size() == team.context.vars.size()) return team;
    return project(team, keep);
}

Team Evaluator::extend_one(const Team& base, const std::string& var, const SortPtr& carrier,
                           const std::vector<std::vector<int>>& cells) {
    Team t;
    t.context = base.context;
    t.context.vars.emplace_back(var, carrier->name);
    t.carriers = base.carriers;
    t.carriers.push_back(carrier);
    size_t total = 0;
    for (const auto& c : cells) total += c.size();
    t.rows.reserve(total);
    for (size_t i = 0; i < base.rows.size(); ++i) {
        for (int a : cells[i]) {
            std::vector<int> row = base.rows[i];
            row.push_back(a);
            t.rows.push_back(std::move(row));
        }
    }
    return t; // base rows ascending and cells ascending keep rows sorted
}

std::optional<Team> Evaluator::build_hint(const Team& base, const std::vector<std::string>& vars,
                                          const std::vector<SortPtr>& carriers,
                                          const HintDesc& d) const {
    const size_t k = vars.size();
    const int w = base.width();
    if (d.src.size() != k) return std::nullopt;
    for (size_t j = 0; j < k; ++j) {
        int s = d.src[j];
        if (s >= 0) {
            if (s >= w || !(*base.carriers[static_cast<size_t>(s)] == *carriers[j]))
                return std::nullopt;
        } else if (-s - 1 >= carriers[j]->size()) {
            return std::nullopt;
        }
    }
    for (int c : d.diag)
        if (c < 0 || c >= w) return std::nullopt;
    for (const auto& [a, b] : d.cross) {
        if (a < 0 || a >= w || b < 0 || b >= w) return std::nullopt;
        if (!(*base.carriers[static_cast<size_t>(a)] == *base.carriers[static_cast<size_t>(b)]))
            return std::nullopt;
    }

    Team t;
    t.context = base.context;
    t.carriers = base.carriers;
    for (size_t j = 0; j < k; ++j) {
        t.context.vars.emplace_back(vars[j], carriers[j]->name);
        t.carriers.push_back(carriers[j]);
    }
    const auto& rows = base.rows;
    const size_t m = rows.size();
    for (size_t i = 0; i < m; ++i) {
        std::set<std::vector<int>> tuples;
        for (size_t r = 0; r < m; ++r) {
            if (d.full_diag && r != i) continue;
            bool ok = true;
            for (int c : d.diag)
                if (rows[r][static_cast<size_t>(c)] != rows[i][static_cast<size_t>(c)]) {
                    ok = false;
                    break;
                }
            if (ok)
                for (const auto& [a, b] : d.cross)
                    if (rows[r][static_cast<size_t>(a)] != rows[i][static_cast<size_t>(b)]) {
                        ok = false;
                        break;
                    }
            if (!ok) continue;
            std::vector<int> tup(k);
            for (size_t j = 0; j < k; ++j)
                tup[j] = d.src[j] >= 0 ? rows[r][static_cast<size_t>(d.src[j])] : -d.src[j] - 1;
            tuples.insert(std::move(tup));
        }
        if (tuples.empty()) return std::nullopt; // not an extension: some row lost
        for (const auto& tup : tuples) {
            std::vector<int> row = rows[i];
            row.insert(row.end(), tup.begin(), tup.end());
            t.rows.push_back(std::move(row));
        }
    }
    return t;
}

// Candidate order matters only for speed: componentwise copies and constants,
// then conditional copies keyed on diagonal columns, then (for single
// variables) copies keyed on cross-column matches, as in transfer witnesses.
template <class Fn>
void Evaluator::enumerate_hints(const Team& base, const std::vector<SortPtr>& carriers,
                                Fn&& fn) const {
    const size_t k = carriers.size();
    const int w = base.width();
    int budget = 20000;
    auto emit = [&](const HintDesc& d) {
        if (budget <= 0) return true;
        --budget;
        return fn(d);
    };

    std::vector<std::vector<int>> options(k); // column index, or -(atom)-1
    std::vector<std::vector<int>> sources(k); // column indices only
    for (size_t j = 0; j < k; ++j) {
        for (int u = 0; u < w; ++u)
            if (*base.carriers[static_cast<size_t>(u)] == *carriers[j]) {
                options[j].push_back(u);
                sources[j].push_back(u);
            }
        for (int a = 0; a < carriers[j]->size(); ++a) options[j].push_back(-a - 1);
    }

    // Stage 1: componentwise copies and constants (rows kept aligned).
    {
        std::vector<size_t> pick(k, 0);
        while (true) {
            HintDesc d;
            d.full_diag = true;
            for (size_t j = 0; j < k; ++j) d.src.push_back(options[j][pick[j]]);
            if (emit(d)) return;
            size_t j = 0;
            while (j < k && pick[j] + 1 == options[j].size()) pick[j++] = 0;
            if (j == k) break;
            ++pick[j];
        }
        if (k == 0) return;
    }

    // Stage 2: joint conditional copies over diagonal column subsets.
    std::vector<std::vector<int>> diag_sets{{}};
    {
        std::vector<int> idx;
        for (int size = 1; size <= std::min(w, 3); ++size) {
            idx.assign(static_cast<size_t>(size), 0);
            for (int i = 0; i < size; ++i) idx[static_cast<size_t>(i)] = i;
            while (true) {
                diag_sets.push_back(idx);
                int i = size - 1;
                while (i >= 0 && idx[static_cast<size_t>(i)] == w - size + i) --i;
                if (i < 0) break;
                ++idx[static_cast<size_t>(i)];
                for (int t = i + 1; t < size; ++t)
                    idx[static_cast<size_t>(t)] = idx[static_cast<size_t>(t - 1)] + 1;
            }
        }
    }
    bool have_sources = true;
    for (size_t j = 0; j < k; ++j) have_sources = have_sources && !sources[j].empty();
    if (have_sources) {
        for (const auto& D : diag_sets) {
            std::vector<size_t> pick(k, 0);
            while (true) {
                HintDesc d;
                d.diag = D;
                for (size_t j = 0; j < k; ++j) d.src.push_back(sources[j][pick[j]]);
                if (emit(d)) return;
                size_t j = 0;
                while (j < k && pick[j] + 1 == sources[j].size()) pick[j++] = 0;
                if (j == k) break;
                ++pick[j];
            }
        }
    }

    // Stage 3 (single variables): conditional copies keyed on cross matches.
    if (k == 1 && !sources[0].empty()) {
        std::vector<std::pair<int, int>> crosses;
        for (int a = 0; a < w; ++a)
            for (int b = 0; b < w; ++b)
                if (a != b &&
                    *base.carriers[static_cast<size_t>(a)] == *base.carriers[static_cast<size_t>(b)])
                    crosses.emplace_back(a, b);
        for (size_t c1 = 0; c1 < crosses.size(); ++c1) {
            for (int u : sources[0]) {
                HintDesc d;
                d.src = {u};
                d.cross = {crosses[c1]};
                if (emit(d)) return;
            }
            for (size_t c2 = c1 + 1; c2 < crosses.size(); ++c2) {
                const auto& [a1, b1] = crosses[c1];
                const auto& [a2, b2] = crosses[c2];
                if (a1 == a2 || b1 == b2) continue;
                for (int u : sources[0]) {
                    HintDesc d;
                    d.src = {u};
                    d.cross = {crosses[c1], crosses[c2]};
                    if (emit(d)) return;
                }
            }
            for (int extra = 0; extra < w; ++extra) {
                for (int u : sources[0]) {
                    HintDesc d;
                    d.src = {u};
                    d.diag = {extra};
                    d.cross = {crosses[c1]};
                    if (emit(d)) return;
                }
            }
        }
    }
}

bool Evaluator::eval_quant_block(const FormulaPtr& f, const Team& team) {
    const bool existential = f->kind == FKind::Exists;
    const FKind head = f->kind;

    std::vector<std::string> vars;
    std::vector<SortPtr> carriers;
    FormulaPtr body = f;
    while (body->kind == head &&
           std::find(vars.begin(), vars.end(), body->name) == vars.end()) {
        vars.push_back(body->name);
        carriers.push_back(sig_.carrier(body->sort_name));
        body = body->lhs;
    }

    Team base = quantifier_base(team, vars);
    const int c0 = carriers[0]->size();
    const long long level_total =
        c0 > 30 ? kHuge : clamped_pow((1LL << c0) - 1, base.size());
    const bool probe = opts_.witness_hints &&
                       (vars.size() > 1 || level_total > (existential ? 64 : 4096));

    if (probe) {
        bool decided = false;
        auto probe_one = [&](const HintDesc& d) {
            auto ext = build_hint(base, vars, carriers, d);
            if (!ext) return false;
            bool v = run(body, *ext);
            if (v == existential) {
                hint_cache_[f.get()] = d;
                decided = true;
                return true;
            }
            return false;
        };
        if (auto it = hint_cache_.find(f.get()); it != hint_cache_.end()) probe_one(it->second);
        if (!decided)
            enumerate_hints(base, carriers, [&](const HintDesc& d) { return probe_one(d); });
        if (decided) return existential;
    }

    return eval_quant_single(f, team);
}

bool Evaluator::eval_quant_single(const FormulaPtr& f, const Team& team) {
    const bool existential = f->kind == FKind::Exists;
    SortPtr carrier = sig_.carrier(f->sort_name);
    Team base = quantifier_base(team, {f->name});
    const int m = base.size();
    const int c = carrier->size();
    if (c > 30)
        throw resource_exceeded("eval: sort '" + f->sort_name + "' too large to quantify over");
    const long long total = clamped_pow((1LL << c) - 1, m);
    if (total > opts_.max_extensions)
        throw resource_exceeded("eval: quantifier over '" + f->sort_name + "' ranges over " +
                                std::to_string(total) + " extensions (cap " +
                                std::to_string(opts_.max_extensions) + ")");

    const uint32_t full = (1u << c) - 1;
    std::vector<uint32_t> mask(static_cast<size_t>(m), 1);
    std::vector<std::vector<int>> cells(static_cast<size_t>(m));
    while (true) {
        for (int i = 0; i < m; ++i) {
            auto& cell = cells[static_cast<size_t>(i)];
            cell.clear();
            for (int a = 0; a < c; ++a)
                if (mask[static_cast<size_t>(i)] & (1u << a)) cell.push_back(a);
        }
        bool v = run(f->lhs, extend_one(base, f->name, carrier, cells));
        if (v == existential) return existential;
        int i = 0;
        while (i < m && mask[static_cast<size_t>(i)] == full) mask[static_cast<size_t>(i++)] = 1;
        if (i == m) break;
        ++mask[static_cast<size_t>(i)];
    }
    return !existential;
}

} // namespace

bool eval(const FormulaPtr& f, const Team& team, const Signature& sig, const EvalOptions& opts) {
    team.validate();
    Context ctx;
    ctx.vars = team.context.vars;
    for (size_t i = 0; i < ctx.vars.size(); ++i) {
        SortPtr declared = sig.carrier(ctx.vars[i].second);
        if (!(*declared == *team.carriers[i]))
            throw invalid_input("eval: team carrier for sort '" + ctx.vars[i].second +
                                "' disagrees with the signature");
    }
    typecheck(*f, ctx, sig);
    Evaluator ev(sig, opts);
    return ev.run(f, team);
}

std::vector<Team> extensions(const Team& team, const std::string& var, const std::string& sort,
                             const Signature& sig) {
    team.validate();
    SortPtr carrier = sig.carrier(sort);
    std::vector<std::string> keep;
    for (const auto& [name, s] : team.context.vars)
        if (name != var) keep.push_back(name);
    Team base = keep.size() == team.context.vars.size() ? team : project(team, keep);
    const int m = base.size();
    const int c = carrier->size();
    if (c > 30) throw resource_exceeded("extensions: sort '" + sort + "' too large");
    const long long total = clamped_pow((1LL << c) - 1, m);
    if (total > EvalOptions{}.max_extensions)
        throw resource_exceeded("extensions: " + std::to_string(total) + " extension teams");

    std::vector<Team> out;
    if (total <= 4096) out.reserve(static_cast<size_t>(total));
    const uint32_t full = (1u << c) - 1;
    std::vector<uint32_t> mask(static_cast<size_t>(m), 1);
    while (true) {
        Team t;
        t.context = base.context;
        t.context.vars.emplace_back(var, carrier->name);
        t.carriers = base.carriers;
        t.carriers.push_back(carrier);
        for (int i = 0; i < m; ++i)
            for (int a = 0; a < c; ++a)
                if (mask[static_cast<size_t>(i)] & (1u << a)) {
                    std::vector<int> row = base.rows[static_cast<size_t>(i)];
                    row.push_back(a);
                    t.rows.push_back(std::move(row));
                }
        out.push_back(std::move(t));
        int i = 0;
        while (i < m && mask[static_cast<size_t>(i)] == full) mask[static_cast<size_t>(i++)] = 1;
        if (i == m) break;
        ++mask[static_cast<size_t>(i)];
    }
    return out;
}

Verdict valid(const FormulaPtr& f, const Context& free_ctx, const Signature& sig,
              const EvalOptions& opts) {
    typecheck(*f, free_ctx, sig);

    // Strip the leading universal prefix: the teams reachable from the
    // one-point team by universal extensions along the prefix are exactly
    // the nonempty teams over the prefix variables, so validity of the
    // whole formula is truth of the matrix at every team over its free
    // variables.
    std::vector<std::pair<std::string, std::string>> acc = free_ctx.vars;
    FormulaPtr matrix = f;
    while (matrix->kind == FKind::Forall) {
        for (auto it = acc.begin(); it != acc.end(); ++it)
            if (it->first == matrix->name) {
                acc.erase(it); // shadowed: the outer variable cannot occur below
                break;
            }
        acc.emplace_back(matrix->name, matrix->sort_name);
        matrix = matrix->lhs;
    }

    const auto fvs = free_vars(*matrix);
    Context ctx;
    std::vector<SortPtr> carriers;
    for (const auto& [name, sort] : acc)
        if (std::find(fvs.begin(), fvs.end(), name) != fvs.end()) {
            ctx.push(name, sort);
            carriers.push_back(sig.carrier(sort));
        }
    if (ctx.vars.size() != fvs.size())
        throw invalid_input("valid: free variable without a declared sort");

    const size_t w = carriers.size();
    long long product = 1;
    for (const auto& s : carriers) {
        product *= s->size();
        if (product > opts.max_teams) break;
    }

    Verdict verdict;
    if (product > opts.max_teams) {
        verdict.status = Validity::resource_exceeded;
        return verdict;
    }
    const long long M = product;

    // Carrier tuple for a mixed-radix index, first variable most significant.
    auto tuple_of = [&](long long t) {
        std::vector<int> row(w);
        for (size_t i = w; i-- > 0;) {
            row[i] = static_cast<int>(t % carriers[i]->size());
            t /= carriers[i]->size();
        }
        return row;
    };

    Evaluator ev(sig, opts);
    for (long long k = 1; k <= M; ++k) {
        const long long tier = clamped_binom(M, k);
        if (verdict.teams_checked + tier > opts.max_teams) {
            if (k == 1) {
                verdict.status = Validity::resource_exceeded;
                return verdict;
            }
            verdict.status = Validity::valid;
            return verdict; // bounded: all teams up to max_rows_checked pass
        }
        std::vector<long long> idx(static_cast<size_t>(k));
        for (long long i = 0; i < k; ++i) idx[static_cast<size_t>(i)] = i;
        while (true) {
            Team team;
            team.context = ctx;
            team.carriers = carriers;
            team.rows.reserve(static_cast<size_t>(k));
            for (long long i : idx) team.rows.push_back(tuple_of(i));
            ++verdict.teams_checked;
            if (!ev.run(matrix, team)) {
                verdict.status = Validity::invalid;
                verdict.max_rows_checked = static_cast<int>(k);
                verdict.countermodel = std::move(team);
                return verdict;
            }
            long long i = k - 1;
            while (i >= 0 && idx[static_cast<size_t>(i)] == M - k + i) --i;
            if (i < 0) break;
            ++idx[static_cast<size_t>(i)];
            for (long long t = i + 1; t < k; ++t)
                idx[static_cast<size_t>(t)] = idx[static_cast<size_t>(t - 1)] + 1;
        }
        verdict.max_rows_checked = static_cast<int>(k);
    }
    verdict.status = Validity::valid;
    verdict.exhaustive = true;
    return verdict;
}

nlohmann::json to_json(const Team& team) {
    nlohmann::json ctx = nlohmann::json::array();
    for (const auto& [name, sort] : team.context.vars) ctx.push_back({name, sort});
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : team.rows) {
        nlohmann::json r = nlohmann::json::array();
        for (size_t c = 0; c < row.size(); ++c)
            r.push_back(team.carriers[c]->atoms[static_cast<size_t>(row[c])]);
        rows.push_back(std::move(r));
    }
    return {{"context", std::move(ctx)}, {"rows", std::move(rows)}};
}

Team team_from_json(const nlohmann::json& j, const Signature& sig) {
    if (!j.is_object() || !j.contains("context") || !j.contains("rows"))
        throw invalid_input("team: expected an object with 'context' and 'rows'");
    Team t;
    for (const auto& entry : j.at("context")) {
        if (!entry.is_array() || entry.size() != 2)
            throw invalid_input("team: context entries are [variable, sort] pairs");
        std::string name = entry.at(0).get<std::string>();
        std::string sort = entry.at(1).get<std::string>();
        t.context.vars.emplace_back(name, sort);
        t.carriers.push_back(sig.carrier(sort));
    }
    std::vector<std::vector<int>> rows;
    for (const auto& jrow : j.at("rows")) {
        if (!jrow.is_array() || jrow.size() != t.carriers.size())
            throw invalid_input("team: row width differs from context width");
        std::vector<int> row;
        for (size_t c = 0; c < t.carriers.size(); ++c) {
            std::string atom = jrow.at(c).get<std::string>();
            int idx = t.carriers[c]->index_of(atom);
            if (idx < 0)
                throw invalid_input("team: '" + atom + "' is not in sort '" +
                                    t.carriers[c]->name + "'");
            row.push_back(idx);
        }
        rows.push_back(std::move(row));
    }
    t.rows = dedup_rows(std::move(rows));
    t.validate();
    return t;
}

nlohmann::json to_json(const Verdict& v) {
    nlohmann::json j{{"status", to_string(v.status)},
                     {"exhaustive", v.exhaustive},
                     {"teams_checked", v.teams_checked},
                     {"max_rows_checked", v.max_rows_checked},
                     {"countermodel", nullptr}};
    if (v.countermodel) j["countermodel"] = to_json(*v.countermodel);
    return j;
}

} // namespace sheaflogic
