// Command-line workbench: evaluate formulas against explicit instances,
// check bounded validity, run the axiom grids, differential-test the
// forcing oracle against the team evaluator, verify the categorical
// structure, and search for countermodels to implications.
//
// Exit codes: 0 all checks pass, 1 a check failed (divergence, axiom
// failure, false verdict, countermodel found), 2 input error, 3 resource
// budget exceeded before any failure was seen.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "sheaflogic/errors.hpp"
#include "sheaflogic/formula.hpp"
#include "sheaflogic/report.hpp"
#include "sheaflogic/suites.hpp"

namespace {

using namespace sheaflogic;

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw invalid_input("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool file_exists(const std::string& path) {
    std::ifstream in(path);
    return static_cast<bool>(in);
}

struct CliOptions {
    std::string model = "multiteam";
    std::string sorts_file;
    std::string config_file;
    long long bound = -1;
    std::vector<int> sizes;
    std::uint64_t seed = 0;
    int jobs = 0;
    int count = 0;
    std::string json_out;
    bool timings = false;
};

// Attach the shared option set to one subcommand; returns the option
// pointers needed to detect explicit use.
void add_common(CLI::App* sub, CliOptions& o) {
    sub->add_option("--model", o.model, "Model to run against: multiteam or schanuel")
        ->check(CLI::IsMember({"multiteam", "schanuel"}));
    sub->add_option("--sorts", o.sorts_file,
                    "Signature file (sort/rel declarations) replacing the built-in one");
    sub->add_option("--config", o.config_file,
                    "JSON config file; explicit flags override its fields");
    sub->add_option("--bound", o.bound,
                    "Resource bound: teams per validity check (multiteam), world size "
                    "(schanuel), or object size (category)");
    sub->add_option("--sizes", o.sizes, "Sort carrier sizes for the axiom grid (2..4)")
        ->delimiter(',');
    sub->add_option("--seed", o.seed, "Seed for corpus generation");
    sub->add_option("--jobs", o.jobs, "Worker threads for suite items");
    sub->add_option("--count", o.count, "Corpus size for oracle differential runs");
    sub->add_option("--json", o.json_out, "Write the JSON-lines report to this file");
    sub->add_flag("--timings", o.timings,
                  "Include wall-clock times in the report (breaks byte-for-byte "
                  "report determinism)");
}

void apply_config_json(RunConfig& cfg, const nlohmann::json& j) {
    if (!j.is_object()) throw invalid_input("config file must hold a JSON object");
    if (j.contains("model")) cfg.model = j.at("model").get<std::string>();
    if (j.contains("sort_sizes")) cfg.sort_sizes = j.at("sort_sizes").get<std::vector<int>>();
    if (j.contains("world_bound")) cfg.world_bound = j.at("world_bound").get<int>();
    if (j.contains("max_teams")) cfg.max_teams = j.at("max_teams").get<long long>();
    if (j.contains("category_bound")) cfg.category_bound = j.at("category_bound").get<int>();
    if (j.contains("corpus_count")) cfg.corpus_count = j.at("corpus_count").get<int>();
    if (j.contains("metamorphic_count"))
        cfg.metamorphic_count = j.at("metamorphic_count").get<int>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("jobs")) cfg.jobs = j.at("jobs").get<int>();
}

RunConfig build_config(const CLI::App* sub, const CliOptions& o, const std::string& command) {
    RunConfig cfg;
    if (!o.config_file.empty()) {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(slurp(o.config_file));
        } catch (const nlohmann::json::exception& e) {
            throw invalid_input(std::string("config file: ") + e.what());
        }
        apply_config_json(cfg, j);
    }
    if (sub->count("--model")) cfg.model = o.model;
    if (sub->count("--sizes")) cfg.sort_sizes = o.sizes;
    if (sub->count("--seed")) cfg.seed = o.seed;
    if (sub->count("--jobs")) cfg.jobs = o.jobs;
    if (sub->count("--count")) cfg.corpus_count = o.count;
    if (sub->count("--bound")) {
        if (command == "category")
            cfg.category_bound = static_cast<int>(o.bound);
        else if (cfg.model == "schanuel")
            cfg.world_bound = static_cast<int>(o.bound);
        else
            cfg.max_teams = o.bound;
    }
    cfg.validate();
    return cfg;
}

Signature load_signature(const CliOptions& o, const std::string& model) {
    if (!o.sorts_file.empty()) return parse_signature(slurp(o.sorts_file));
    return default_signature(model);
}

int emit(const SuiteReport& rep, const CliOptions& o) {
    std::string lines = report_lines(rep, o.timings);
    if (o.json_out.empty()) {
        std::cout << lines;
    } else {
        std::ofstream out(o.json_out, std::ios::binary);
        if (!out) throw invalid_input("cannot write report file: " + o.json_out);
        out << lines;
    }
    std::cerr << report_text(rep);
    return rep.exit_code();
}

ParsedFormulaFile load_formula_arg(const std::string& arg) {
    // A path to a formula file, or inline formula text.
    if (file_exists(arg)) return parse_formula_file(slurp(arg));
    ParsedFormulaFile file;
    file.formula = parse_formula(arg);
    return file;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sheaflogic — workbench for team semantics of equivalence and "
                 "conditional-independence atoms"};
    app.require_subcommand(1);

    CliOptions o;
    std::string formula_path, instance_path, search_arg;

    CLI::App* cmd_eval = app.add_subcommand(
        "eval", "Evaluate a formula file against one instance (multiteam: team JSON; "
                "schanuel: {\"world\": n, \"rho\": {var: [names...]}})");
    cmd_eval->add_option("formula", formula_path, "Formula file")->required();
    cmd_eval->add_option("instance", instance_path, "Instance JSON file")->required();
    add_common(cmd_eval, o);

    CLI::App* cmd_check = app.add_subcommand(
        "check", "Check bounded validity of a formula file (exhaustive when the "
                 "instance space fits the bound)");
    cmd_check->add_option("formula", formula_path, "Formula file")->required();
    add_common(cmd_check, o);

    CLI::App* cmd_axioms = app.add_subcommand(
        "axioms", "Instantiate every axiom schema over the grid and check validity; "
                  "includes the negative control sentence");
    add_common(cmd_axioms, o);

    CLI::App* cmd_diff = app.add_subcommand(
        "oracle-diff", "Differential-test the forcing oracle against the team evaluator "
                       "on a seeded corpus; includes metamorphic restriction checks");
    add_common(cmd_diff, o);

    CLI::App* cmd_category = app.add_subcommand(
        "category", "Check independent-pullback axioms, pullback preservation, and "
                    "subsheaf closure on both base sites");
    add_common(cmd_category, o);

    CLI::App* cmd_search = app.add_subcommand(
        "search", "Search for a countermodel to an implication (formula file or "
                  "inline text; undeclared variables take the signature's first sort)");
    cmd_search->add_option("formula", search_arg, "Formula file or inline formula")->required();
    add_common(cmd_search, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2; // help/version exit 0; bad usage is an input error
    }

    try {
        if (cmd_eval->parsed()) {
            RunConfig cfg = build_config(cmd_eval, o, "eval");
            Signature sig = load_signature(o, cfg.model);
            ParsedFormulaFile file = parse_formula_file(slurp(formula_path));
            nlohmann::json instance;
            try {
                instance = nlohmann::json::parse(slurp(instance_path));
            } catch (const nlohmann::json::exception& e) {
                throw invalid_input(std::string("instance file: ") + e.what());
            }
            return emit(run_eval(cfg, sig, file, instance), o);
        }
        if (cmd_check->parsed()) {
            RunConfig cfg = build_config(cmd_check, o, "check");
            Signature sig = load_signature(o, cfg.model);
            return emit(run_check(cfg, sig, parse_formula_file(slurp(formula_path))), o);
        }
        if (cmd_axioms->parsed()) {
            RunConfig cfg = build_config(cmd_axioms, o, "axioms");
            return emit(run_axioms(cfg), o);
        }
        if (cmd_diff->parsed()) {
            RunConfig cfg = build_config(cmd_diff, o, "oracle-diff");
            SuiteReport rep = run_oracle_diff(cfg);
            SuiteReport meta = run_metamorphic(cfg);
            for (auto& c : meta.checks) rep.checks.push_back(std::move(c));
            return emit(rep, o);
        }
        if (cmd_category->parsed()) {
            RunConfig cfg = build_config(cmd_category, o, "category");
            return emit(run_category(cfg), o);
        }
        if (cmd_search->parsed()) {
            RunConfig cfg = build_config(cmd_search, o, "search");
            Signature sig = load_signature(o, cfg.model);
            SuiteReport rep = run_check(cfg, sig, load_formula_arg(search_arg));
            rep.suite = "search";
            for (auto& c : rep.checks)
                if (c.name == "valid") c.name = "countermodel-search";
            return emit(rep, o);
        }
    } catch (const invalid_input& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const resource_exceeded& e) {
        std::cerr << "resource budget exceeded: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
