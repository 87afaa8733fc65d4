#pragma once

// Surface language and AST for the logic: equality, equivalence and
// conditional-independence atoms, declared unary relations, propositional
// connectives, and sorted quantifiers.
//
// Grammar (invented surface syntax; the underlying logic fixes none):
//
//   formula  := quant | impl
//   quant    := ("forall" | "exists") ident ":" ident "." formula
//   impl     := disj [ "->" formula ]
//   disj     := conj { "or" conj }
//   conj     := unary { "and" unary }
//   unary    := "not" unary | atom | "(" formula ")"
//   atom     := "eq" "(" ident "," ident ")"
//             | "equiv" "(" ident-list ";" ident-list ")"
//             | "indep" "(" ident-list ";" ident-list "|" ident-list ")"
//             | ident "(" ident-list ")"                 -- declared relation
//   ident-list may be empty.
//
// Sort/relation declaration files:
//
//   sort A = {a, b, c}        enumerated carrier
//   sort B = 3                carrier {0, 1, 2}
//   sort N = names(2)         pairs of names (nominal model only)
//   rel P = diamond A {a}     unary relation: some entry in {a}
//   rel Q = box A {a, b}      unary relation: every entry in {a, b}
//
// Formula files may declare their free variables first: `var x : A`.
// `#` starts a comment anywhere. Connectives are keywords because `|` is
// taken by the conditioning bar.

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sheaflogic/multiteam.hpp"

namespace sheaflogic {

enum class FKind { Eq, Equiv, Indep, Rel, Not, And, Or, Implies, Exists, Forall };

struct Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

struct Formula {
    FKind kind;

    // Eq: xs = {lhs, rhs}. Equiv: xs ; ys. Indep: xs ; ys | zs.
    // Rel: name + xs. Quantifiers: name = bound variable, sort_name, lhs = body.
    // Not: lhs. And/Or/Implies: lhs, rhs.
    std::vector<std::string> xs, ys, zs;
    std::string name;
    std::string sort_name;
    FormulaPtr lhs, rhs;
};

// Structural equality (names compared literally, no alpha-conversion).
bool operator==(const Formula& a, const Formula& b);
inline bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }

// Constructors.
FormulaPtr f_eq(std::string x, std::string y);
FormulaPtr f_equiv(std::vector<std::string> xs, std::vector<std::string> ys);
FormulaPtr f_indep(std::vector<std::string> xs, std::vector<std::string> ys,
                   std::vector<std::string> zs);
FormulaPtr f_rel(std::string name, std::vector<std::string> xs);
FormulaPtr f_not(FormulaPtr a);
FormulaPtr f_and(FormulaPtr a, FormulaPtr b);
FormulaPtr f_or(FormulaPtr a, FormulaPtr b);
FormulaPtr f_implies(FormulaPtr a, FormulaPtr b);
FormulaPtr f_exists(std::string var, std::string sort, FormulaPtr body);
FormulaPtr f_forall(std::string var, std::string sort, FormulaPtr body);

// Sorts in a signature either enumerate a finite carrier or denote tuples of
// names of a fixed arity (the nominal model).
struct SortDecl {
    enum class Kind { enumerated, names };
    std::string name;
    Kind kind = Kind::enumerated;
    SortPtr carrier;    // enumerated
    int name_arity = 0; // names
};

struct RelationDecl {
    enum class Mode { box, diamond };
    std::string name;
    Mode mode = Mode::diamond;
    std::string sort_name;          // the single argument's sort
    std::vector<std::string> atoms; // subset of the sort's carrier
};

struct Signature {
    std::vector<SortDecl> sorts;
    std::vector<RelationDecl> relations;

    const SortDecl* find_sort(const std::string& n) const;
    const RelationDecl* find_relation(const std::string& n) const;
    // Carrier of an enumerated sort; throws for names sorts / unknown names.
    SortPtr carrier(const std::string& n) const;
};

// Ordered typing context; names distinct, later entries do not shadow.
struct Context {
    std::vector<std::pair<std::string, std::string>> vars; // (variable, sort name)

    int index_of(const std::string& name) const;
    const std::string& sort_of(const std::string& name) const; // throws if absent
    void push(const std::string& name, const std::string& sort);
    bool operator==(const Context& o) const { return vars == o.vars; }
};

// Free variables in first-occurrence order.
std::vector<std::string> free_vars(const Formula& f);

// Verify f is well-sorted in ctx: variables in scope, eq operands share a
// sort, equiv vectors match componentwise, relations applied to one variable
// of their declared sort, quantifier sorts declared. Throws invalid_input.
void typecheck(const Formula& f, const Context& ctx, const Signature& sig);

// Simultaneous capture-avoiding substitution frame -> replacement (both are
// variable vectors; frame entries distinct and covering FV(f)). Bound
// variables are renamed apart from `avoid` and the replacement when needed.
FormulaPtr substitute(const FormulaPtr& f, const std::vector<std::string>& frame,
                      const std::vector<std::string>& replacement);

// Parsing and printing. parse(print(f)) == *f structurally.
FormulaPtr parse_formula(const std::string& text);
std::string print_formula(const Formula& f);
inline std::string print_formula(const FormulaPtr& f) { return print_formula(*f); }

struct ParsedFormulaFile {
    std::vector<std::pair<std::string, std::string>> vars; // declared free variables
    FormulaPtr formula;
};
ParsedFormulaFile parse_formula_file(const std::string& text);

Signature parse_signature(const std::string& text);

// ---------------------------------------------------------------------------
// Axiom schemas.
//
// Every schema is returned as a closed formula (universal closure over its
// parameter vectors). Sort vectors are given by name; permutations are
// 0-based index vectors. Schemas taking a side formula phi interpret it over
// the distinct variable frame phi_frame, which must cover FV(phi).
struct SchemaArgs {
    std::vector<std::string> x_sorts;
    std::vector<std::string> y_sorts;
    std::vector<std::string> z_sorts;
    std::vector<std::string> w_sorts;
    std::vector<int> pi;   // permutation of the x-vector
    std::vector<int> pi_y; // permutation of the y-vector
    std::vector<int> pi_z; // permutation of the z-vector
    FormulaPtr phi;
    std::vector<std::string> phi_frame;
};

// Known ids: equiv:A..equiv:G, indep:P, indep:A, indep:B, indep:W, indep:C,
// indep:D, indep:Z, existence-preservation.
FormulaPtr instantiate_schema(const std::string& id, const SchemaArgs& args);

const std::vector<std::string>& all_schema_ids();

} // namespace sheaflogic
