#include "sheaflogic/multiteam.hpp"

#include <algorithm>
#include <map>
#include <utility>

#include "sheaflogic/errors.hpp"

namespace sheaflogic {

SortValueSet::SortValueSet(std::string n, std::vector<std::string> a)
    : name(std::move(n)), atoms(std::move(a)) {
    validate();
}

void SortValueSet::validate() const {
    if (atoms.empty()) throw invalid_input("sort '" + name + "': needs at least one value");
    std::set<std::string> seen(atoms.begin(), atoms.end());
    if (seen.size() != atoms.size())
        throw invalid_input("sort '" + name + "': values must be pairwise distinct");
}

int SortValueSet::index_of(const std::string& atom) const {
    for (size_t i = 0; i < atoms.size(); ++i)
        if (atoms[i] == atom) return static_cast<int>(i);
    return -1;
}

NondetVar::NondetVar(FinSet s, SortPtr so, std::vector<int> vals)
    : sample(std::move(s)), sort(std::move(so)), values(std::move(vals)) {
    validate();
}

void NondetVar::validate() const {
    sample.validate();
    if (!sort) throw invalid_input("variable has no sort");
    sort->validate();
    if (static_cast<int>(values.size()) != sample.size)
        throw invalid_input("variable on sample of size " + std::to_string(sample.size) +
                            " has " + std::to_string(values.size()) + " values");
    for (int v : values)
        if (v < 0 || v >= sort->size())
            throw invalid_input("value index " + std::to_string(v) + " outside sort '" +
                                sort->name + "'");
}

std::vector<int> NondetVar::image() const {
    std::vector<int> img;
    for (int v : values)
        if (std::find(img.begin(), img.end(), v) == img.end()) img.push_back(v);
    return img;
}

NondetVar restrict_var(const NondetVar& x, const FinSurjection& c) {
    if (c.cod != x.sample)
        throw invalid_input("restrict: map targets sample of size " + std::to_string(c.cod.size) +
                            ", variable lives on size " + std::to_string(x.sample.size));
    std::vector<int> vals(c.map.size());
    for (size_t i = 0; i < c.map.size(); ++i)
        vals[i] = x.values[static_cast<size_t>(c.map[i])];
    return NondetVar(c.dom, x.sort, std::move(vals));
}

bool is_invariant(const NondetVar& y, const FinSurjection& c) {
    if (c.dom != y.sample)
        throw invalid_input("is_invariant: variable and map domain disagree");
    // Constant on fibers: remember the first value seen over each target.
    std::vector<int> rep(static_cast<size_t>(c.cod.size), -1);
    for (int i = 0; i < y.sample.size; ++i) {
        int& r = rep[static_cast<size_t>(c(i))];
        if (r == -1)
            r = y(i);
        else if (r != y(i))
            return false;
    }
    return true;
}

NondetVar descend(const NondetVar& y, const FinSurjection& c) {
    if (c.dom != y.sample)
        throw invalid_input("descend: variable and map domain disagree");
    std::vector<int> vals(static_cast<size_t>(c.cod.size), -1);
    for (int i = 0; i < y.sample.size; ++i) {
        int& v = vals[static_cast<size_t>(c(i))];
        if (v == -1)
            v = y(i);
        else if (v != y(i))
            throw not_invariant("variable is not constant on the fiber over " +
                                std::to_string(c(i)));
    }
    return NondetVar(c.cod, y.sort, std::move(vals));
}

bool equiextensive(const NondetVar& x, const NondetVar& y) {
    if (x.sample != y.sample || *x.sort != *y.sort)
        throw invalid_input("equiextensive: variables must share sample set and sort");
    auto ix = x.image();
    auto iy = y.image();
    std::sort(ix.begin(), ix.end());
    std::sort(iy.begin(), iy.end());
    return ix == iy;
}

bool cond_indep(const NondetVar& x, const NondetVar& y, const NondetVar& z) {
    if (x.sample != y.sample || x.sample != z.sample)
        throw invalid_input("cond_indep: variables must share a sample set");
    int n = x.sample.size;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (z(i) != z(j)) continue;
            // (x(i), z(i)) and (y(j), z(j)) are realized; the triple
            // (x(i), y(j), z(i)) must be realized at a single point.
            bool found = false;
            for (int w = 0; w < n && !found; ++w)
                found = x(w) == x(i) && y(w) == y(j) && z(w) == z(i);
            if (!found) return false;
        }
    return true;
}

namespace {

std::vector<int> subset_indices(const NondetVar& x, const std::vector<std::string>& p) {
    std::vector<int> idx;
    idx.reserve(p.size());
    for (const auto& atom : p) {
        int i = x.sort->index_of(atom);
        if (i < 0)
            throw invalid_input("subset value '" + atom + "' is not in sort '" + x.sort->name +
                                "'");
        idx.push_back(i);
    }
    return idx;
}

} // namespace

bool box_member(const NondetVar& x, const std::vector<std::string>& p) {
    auto idx = subset_indices(x, p);
    for (int v : x.values)
        if (std::find(idx.begin(), idx.end(), v) == idx.end()) return false;
    return true;
}

bool diamond_member(const NondetVar& x, const std::vector<std::string>& p) {
    auto idx = subset_indices(x, p);
    for (int v : x.values)
        if (std::find(idx.begin(), idx.end(), v) != idx.end()) return true;
    return false;
}

SupportResult support(const NondetVar& x) {
    auto fact = image_factorise(x.values, x.sample);
    SupportResult res;
    res.sample_s = fact.mid;
    res.p = fact.surj;
    res.xs = NondetVar(fact.mid, x.sort, fact.inj);
    return res;
}

const char* to_string(SubsheafRelation rel) {
    switch (rel) {
        case SubsheafRelation::equiextension: return "equiextension";
        case SubsheafRelation::cond_indep: return "cond_indep";
        case SubsheafRelation::box: return "box";
        case SubsheafRelation::diamond: return "diamond";
    }
    return "?";
}

namespace {

SortPtr canonical_sort(int k) {
    std::vector<std::string> atoms;
    for (int i = 0; i < k; ++i) atoms.push_back("a" + std::to_string(i));
    return std::make_shared<SortValueSet>("S" + std::to_string(k), std::move(atoms));
}

// Runs pred over every tuple of variables on every sample set of size
// <= bound and every surjective restriction, recording violations of
// closure (member restricts to member) and reflection (member pulled back
// along a surjection was already a member).
template <class Pred>
AxiomReport closure_report(const std::string& relation, int arity,
                           const std::vector<std::vector<SortPtr>>& sort_choices, int bound,
                           Pred&& pred) {
    AxiomCheck closure{"restriction-closure(" + relation + ")", true, 0, ""};
    AxiomCheck reflection{"reflection(" + relation + ")", true, 0, ""};

    auto describe = [](const std::vector<NondetVar>& vars, const FinSurjection& c) {
        std::string out = "c=[";
        for (size_t i = 0; i < c.map.size(); ++i)
            out += (i ? "," : "") + std::to_string(c.map[i]);
        out += "]";
        for (const auto& v : vars) {
            out += " [";
            for (size_t i = 0; i < v.values.size(); ++i)
                out += (i ? "," : "") + v.atom_at(static_cast<int>(i));
            out += "]";
        }
        return out;
    };

    for (const auto& sorts : sort_choices) {
        for (int n = 1; n <= bound; ++n) {
            FinSet omega(n);
            // Odometer over the tuple of variables.
            std::vector<std::vector<std::vector<int>>> var_values;
            for (int a = 0; a < arity; ++a)
                var_values.push_back(all_maps(n, sorts[static_cast<size_t>(a)]->size()));
            std::vector<size_t> idx(static_cast<size_t>(arity), 0);
            while (true) {
                std::vector<NondetVar> vars;
                vars.reserve(static_cast<size_t>(arity));
                for (int a = 0; a < arity; ++a)
                    vars.emplace_back(omega, sorts[static_cast<size_t>(a)],
                                      var_values[static_cast<size_t>(a)][idx[static_cast<size_t>(a)]]);
                bool member = pred(vars);
                for (int m = n; m <= bound; ++m)
                    for (const auto& c : all_surjections(FinSet(m), omega)) {
                        std::vector<NondetVar> restricted;
                        restricted.reserve(vars.size());
                        for (const auto& v : vars) restricted.push_back(restrict_var(v, c));
                        bool member_r = pred(restricted);
                        ++closure.cases;
                        if (member && !member_r && closure.pass) {
                            closure.pass = false;
                            closure.counterexample = describe(vars, c);
                        }
                        ++reflection.cases;
                        if (member_r && !member && reflection.pass) {
                            reflection.pass = false;
                            reflection.counterexample = describe(vars, c);
                        }
                    }
                // Advance the odometer.
                int a = arity - 1;
                while (a >= 0) {
                    if (++idx[static_cast<size_t>(a)] < var_values[static_cast<size_t>(a)].size())
                        break;
                    idx[static_cast<size_t>(a)] = 0;
                    --a;
                }
                if (a < 0) break;
            }
        }
    }
    AxiomReport report;
    report.checks.push_back(std::move(closure));
    report.checks.push_back(std::move(reflection));
    return report;
}

} // namespace

AxiomReport check_subsheaf_closure(SubsheafRelation rel, int bound) {
    if (bound < 1 || bound > 4)
        throw invalid_input("check_subsheaf_closure: bound must be between 1 and 4");
    std::vector<SortPtr> sorts;
    for (int k = 1; k <= bound; ++k) sorts.push_back(canonical_sort(k));

    switch (rel) {
        case SubsheafRelation::equiextension: {
            std::vector<std::vector<SortPtr>> choices;
            for (const auto& s : sorts) choices.push_back({s, s});
            return closure_report("equiextension", 2, choices, bound,
                                  [](const std::vector<NondetVar>& v) {
                                      return equiextensive(v[0], v[1]);
                                  });
        }
        case SubsheafRelation::cond_indep: {
            std::vector<std::vector<SortPtr>> choices;
            for (const auto& a : sorts)
                for (const auto& b : sorts)
                    for (const auto& c : sorts) choices.push_back({a, b, c});
            return closure_report("cond_indep", 3, choices, bound,
                                  [](const std::vector<NondetVar>& v) {
                                      return cond_indep(v[0], v[1], v[2]);
                                  });
        }
        case SubsheafRelation::box:
        case SubsheafRelation::diamond: {
            // One report accumulated across every atom subset of every sort.
            AxiomReport merged;
            bool is_box = rel == SubsheafRelation::box;
            std::string relation = is_box ? "box" : "diamond";
            AxiomCheck closure{"restriction-closure(" + relation + ")", true, 0, ""};
            AxiomCheck reflection{"reflection(" + relation + ")", true, 0, ""};
            for (const auto& s : sorts) {
                int k = s->size();
                for (int mask = 0; mask < (1 << k); ++mask) {
                    std::vector<std::string> p;
                    for (int i = 0; i < k; ++i)
                        if (mask & (1 << i)) p.push_back(s->atoms[static_cast<size_t>(i)]);
                    auto rep = closure_report(
                        relation, 1, {{s}}, bound, [&](const std::vector<NondetVar>& v) {
                            return is_box ? box_member(v[0], p) : diamond_member(v[0], p);
                        });
                    for (auto& c : rep.checks) {
                        AxiomCheck& into = c.name.rfind("restriction", 0) == 0 ? closure
                                                                               : reflection;
                        into.cases += c.cases;
                        if (!c.pass && into.pass) {
                            into.pass = false;
                            into.counterexample = c.counterexample;
                        }
                    }
                }
            }
            merged.checks.push_back(std::move(closure));
            merged.checks.push_back(std::move(reflection));
            return merged;
        }
    }
    throw invalid_input("check_subsheaf_closure: unknown relation");
}

nlohmann::json to_json(const NondetVar& x) {
    nlohmann::json vals = nlohmann::json::array();
    for (int v : x.values) vals.push_back(x.sort->atoms[static_cast<size_t>(v)]);
    return nlohmann::json{{"sample", x.sample.size}, {"sort", x.sort->name}, {"values", vals}};
}

NondetVar nondet_var_from_json(const nlohmann::json& j, const std::vector<SortPtr>& known_sorts) {
    if (!j.is_object() || !j.contains("sample") || !j.contains("sort") || !j.contains("values"))
        throw invalid_input("variable JSON needs \"sample\", \"sort\" and \"values\"");
    int n = j.at("sample").get<int>();
    std::string sort_name = j.at("sort").get<std::string>();
    SortPtr sort;
    for (const auto& s : known_sorts)
        if (s->name == sort_name) sort = s;
    if (!sort) throw invalid_input("unknown sort '" + sort_name + "'");
    std::vector<int> vals;
    for (const auto& v : j.at("values")) {
        std::string atom = v.is_string() ? v.get<std::string>() : v.dump();
        int idx = sort->index_of(atom);
        if (idx < 0)
            throw invalid_input("value '" + atom + "' is not in sort '" + sort_name + "'");
        vals.push_back(idx);
    }
    return NondetVar(FinSet(n), sort, std::move(vals));
}

} // namespace sheaflogic
