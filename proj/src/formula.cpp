#include "sheaflogic/formula.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <utility>

#include "sheaflogic/errors.hpp"

namespace sheaflogic {

// --------------------------------------------------------------------------
// AST

bool operator==(const Formula& a, const Formula& b) {
    if (a.kind != b.kind || a.xs != b.xs || a.ys != b.ys || a.zs != b.zs || a.name != b.name ||
        a.sort_name != b.sort_name)
        return false;
    if (static_cast<bool>(a.lhs) != static_cast<bool>(b.lhs) ||
        static_cast<bool>(a.rhs) != static_cast<bool>(b.rhs))
        return false;
    if (a.lhs && !(*a.lhs == *b.lhs)) return false;
    if (a.rhs && !(*a.rhs == *b.rhs)) return false;
    return true;
}

namespace {

FormulaPtr make(Formula f) { return std::make_shared<Formula>(std::move(f)); }

} // namespace

FormulaPtr f_eq(std::string x, std::string y) {
    Formula f;
    f.kind = FKind::Eq;
    f.xs = {std::move(x), std::move(y)};
    return make(std::move(f));
}

FormulaPtr f_equiv(std::vector<std::string> xs, std::vector<std::string> ys) {
    if (xs.size() != ys.size())
        throw invalid_input("equiv atom needs vectors of equal length, got " +
                            std::to_string(xs.size()) + " and " + std::to_string(ys.size()));
    Formula f;
    f.kind = FKind::Equiv;
    f.xs = std::move(xs);
    f.ys = std::move(ys);
    return make(std::move(f));
}

FormulaPtr f_indep(std::vector<std::string> xs, std::vector<std::string> ys,
                   std::vector<std::string> zs) {
    Formula f;
    f.kind = FKind::Indep;
    f.xs = std::move(xs);
    f.ys = std::move(ys);
    f.zs = std::move(zs);
    return make(std::move(f));
}

FormulaPtr f_rel(std::string name, std::vector<std::string> xs) {
    Formula f;
    f.kind = FKind::Rel;
    f.name = std::move(name);
    f.xs = std::move(xs);
    return make(std::move(f));
}

FormulaPtr f_not(FormulaPtr a) {
    Formula f;
    f.kind = FKind::Not;
    f.lhs = std::move(a);
    return make(std::move(f));
}

namespace {
FormulaPtr binop(FKind k, FormulaPtr a, FormulaPtr b) {
    Formula f;
    f.kind = k;
    f.lhs = std::move(a);
    f.rhs = std::move(b);
    return make(std::move(f));
}
} // namespace

FormulaPtr f_and(FormulaPtr a, FormulaPtr b) { return binop(FKind::And, std::move(a), std::move(b)); }
FormulaPtr f_or(FormulaPtr a, FormulaPtr b) { return binop(FKind::Or, std::move(a), std::move(b)); }
FormulaPtr f_implies(FormulaPtr a, FormulaPtr b) {
    return binop(FKind::Implies, std::move(a), std::move(b));
}

namespace {
FormulaPtr quant(FKind k, std::string var, std::string sort, FormulaPtr body) {
    Formula f;
    f.kind = k;
    f.name = std::move(var);
    f.sort_name = std::move(sort);
    f.lhs = std::move(body);
    return make(std::move(f));
}
} // namespace

FormulaPtr f_exists(std::string var, std::string sort, FormulaPtr body) {
    return quant(FKind::Exists, std::move(var), std::move(sort), std::move(body));
}
FormulaPtr f_forall(std::string var, std::string sort, FormulaPtr body) {
    return quant(FKind::Forall, std::move(var), std::move(sort), std::move(body));
}

// --------------------------------------------------------------------------
// Signature and context

const SortDecl* Signature::find_sort(const std::string& n) const {
    for (const auto& s : sorts)
        if (s.name == n) return &s;
    return nullptr;
}

const RelationDecl* Signature::find_relation(const std::string& n) const {
    for (const auto& r : relations)
        if (r.name == n) return &r;
    return nullptr;
}

SortPtr Signature::carrier(const std::string& n) const {
    const SortDecl* s = find_sort(n);
    if (!s) throw invalid_input("unknown sort '" + n + "'");
    if (s->kind != SortDecl::Kind::enumerated)
        throw invalid_input("sort '" + n + "' has no enumerated carrier");
    return s->carrier;
}

int Context::index_of(const std::string& name) const {
    for (size_t i = 0; i < vars.size(); ++i)
        if (vars[i].first == name) return static_cast<int>(i);
    return -1;
}

const std::string& Context::sort_of(const std::string& name) const {
    int i = index_of(name);
    if (i < 0) throw invalid_input("variable '" + name + "' is not in the context");
    return vars[static_cast<size_t>(i)].second;
}

void Context::push(const std::string& name, const std::string& sort) {
    if (index_of(name) >= 0)
        throw invalid_input("variable '" + name + "' already declared in the context");
    vars.emplace_back(name, sort);
}

// --------------------------------------------------------------------------
// Free variables

namespace {

void collect_free(const Formula& f, std::vector<std::string>& bound,
                  std::vector<std::string>& out) {
    auto add = [&](const std::string& v) {
        if (std::find(bound.begin(), bound.end(), v) != bound.end()) return;
        if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    };
    switch (f.kind) {
        case FKind::Eq:
        case FKind::Rel:
        case FKind::Equiv:
        case FKind::Indep:
            for (const auto& v : f.xs) add(v);
            for (const auto& v : f.ys) add(v);
            for (const auto& v : f.zs) add(v);
            return;
        case FKind::Not:
            collect_free(*f.lhs, bound, out);
            return;
        case FKind::And:
        case FKind::Or:
        case FKind::Implies:
            collect_free(*f.lhs, bound, out);
            collect_free(*f.rhs, bound, out);
            return;
        case FKind::Exists:
        case FKind::Forall: {
            bound.push_back(f.name);
            collect_free(*f.lhs, bound, out);
            bound.pop_back();
            return;
        }
    }
}

} // namespace

std::vector<std::string> free_vars(const Formula& f) {
    std::vector<std::string> bound, out;
    collect_free(f, bound, out);
    return out;
}

// --------------------------------------------------------------------------
// Typechecking

namespace {

void typecheck_rec(const Formula& f, Context& ctx, const Signature& sig) {
    auto sort_of = [&](const std::string& v) -> const std::string& {
        int i = ctx.index_of(v);
        if (i < 0) throw invalid_input("variable '" + v + "' is not in scope");
        return ctx.vars[static_cast<size_t>(i)].second;
    };
    switch (f.kind) {
        case FKind::Eq: {
            const auto& sa = sort_of(f.xs[0]);
            const auto& sb = sort_of(f.xs[1]);
            if (sa != sb)
                throw invalid_input("eq(" + f.xs[0] + "," + f.xs[1] + "): sorts " + sa + " and " +
                                    sb + " differ");
            return;
        }
        case FKind::Equiv: {
            if (f.xs.size() != f.ys.size())
                throw invalid_input("equiv vectors have different lengths");
            for (size_t i = 0; i < f.xs.size(); ++i) {
                const auto& sa = sort_of(f.xs[i]);
                const auto& sb = sort_of(f.ys[i]);
                if (sa != sb)
                    throw invalid_input("equiv: position " + std::to_string(i + 1) +
                                        " pairs sort " + sa + " with " + sb + " (variable '" +
                                        f.ys[i] + "')");
            }
            return;
        }
        case FKind::Indep:
            for (const auto& v : f.xs) sort_of(v);
            for (const auto& v : f.ys) sort_of(v);
            for (const auto& v : f.zs) sort_of(v);
            return;
        case FKind::Rel: {
            const RelationDecl* rel = sig.find_relation(f.name);
            if (!rel) throw invalid_input("unknown relation '" + f.name + "'");
            if (f.xs.size() != 1)
                throw invalid_input("relation '" + f.name + "' takes exactly one variable");
            const auto& sa = sort_of(f.xs[0]);
            if (sa != rel->sort_name)
                throw invalid_input("relation '" + f.name + "' expects sort " + rel->sort_name +
                                    ", variable '" + f.xs[0] + "' has sort " + sa);
            return;
        }
        case FKind::Not:
            typecheck_rec(*f.lhs, ctx, sig);
            return;
        case FKind::And:
        case FKind::Or:
        case FKind::Implies:
            typecheck_rec(*f.lhs, ctx, sig);
            typecheck_rec(*f.rhs, ctx, sig);
            return;
        case FKind::Exists:
        case FKind::Forall: {
            if (!sig.find_sort(f.sort_name))
                throw invalid_input("quantifier over unknown sort '" + f.sort_name + "'");
            // Shadowing is allowed: replace any outer binding for the scope
            // of the body, then restore.
            int prev = ctx.index_of(f.name);
            std::string saved;
            if (prev >= 0) {
                saved = ctx.vars[static_cast<size_t>(prev)].second;
                ctx.vars[static_cast<size_t>(prev)].second = f.sort_name;
            } else {
                ctx.vars.emplace_back(f.name, f.sort_name);
            }
            typecheck_rec(*f.lhs, ctx, sig);
            if (prev >= 0)
                ctx.vars[static_cast<size_t>(prev)].second = saved;
            else
                ctx.vars.pop_back();
            return;
        }
    }
}

} // namespace

void typecheck(const Formula& f, const Context& ctx, const Signature& sig) {
    for (const auto& [v, s] : ctx.vars)
        if (!sig.find_sort(s))
            throw invalid_input("context variable '" + v + "' has unknown sort '" + s + "'");
    Context scratch = ctx;
    typecheck_rec(f, scratch, sig);
}

// --------------------------------------------------------------------------
// Substitution

namespace {

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
    std::string cand = base;
    do {
        cand += "'";
    } while (avoid.count(cand));
    return cand;
}

FormulaPtr subst_rec(const Formula& f, std::map<std::string, std::string> sigma) {
    auto rep = [&](const std::string& v) {
        auto it = sigma.find(v);
        return it == sigma.end() ? v : it->second;
    };
    auto rep_all = [&](const std::vector<std::string>& vs) {
        std::vector<std::string> out;
        out.reserve(vs.size());
        for (const auto& v : vs) out.push_back(rep(v));
        return out;
    };
    switch (f.kind) {
        case FKind::Eq: return f_eq(rep(f.xs[0]), rep(f.xs[1]));
        case FKind::Equiv: return f_equiv(rep_all(f.xs), rep_all(f.ys));
        case FKind::Indep: return f_indep(rep_all(f.xs), rep_all(f.ys), rep_all(f.zs));
        case FKind::Rel: return f_rel(f.name, rep_all(f.xs));
        case FKind::Not: return f_not(subst_rec(*f.lhs, sigma));
        case FKind::And: return f_and(subst_rec(*f.lhs, sigma), subst_rec(*f.rhs, sigma));
        case FKind::Or: return f_or(subst_rec(*f.lhs, sigma), subst_rec(*f.rhs, sigma));
        case FKind::Implies:
            return f_implies(subst_rec(*f.lhs, sigma), subst_rec(*f.rhs, sigma));
        case FKind::Exists:
        case FKind::Forall: {
            sigma.erase(f.name);
            // Rename the binder when it would capture a substituted name.
            std::set<std::string> incoming;
            for (const auto& v : free_vars(*f.lhs))
                if (v != f.name) {
                    auto it = sigma.find(v);
                    incoming.insert(it == sigma.end() ? v : it->second);
                }
            std::string binder = f.name;
            if (incoming.count(binder)) {
                binder = fresh_name(binder, incoming);
                sigma[f.name] = binder;
            }
            auto body = subst_rec(*f.lhs, std::move(sigma));
            return quant(f.kind, binder, f.sort_name, std::move(body));
        }
    }
    throw invalid_input("substitute: unknown node");
}

} // namespace

FormulaPtr substitute(const FormulaPtr& f, const std::vector<std::string>& frame,
                      const std::vector<std::string>& replacement) {
    if (frame.size() != replacement.size())
        throw invalid_input("substitute: frame and replacement lengths differ");
    std::set<std::string> seen(frame.begin(), frame.end());
    if (seen.size() != frame.size())
        throw invalid_input("substitute: frame variables must be distinct");
    for (const auto& v : free_vars(*f))
        if (!seen.count(v))
            throw invalid_input("substitute: free variable '" + v + "' not covered by the frame");
    std::map<std::string, std::string> sigma;
    for (size_t i = 0; i < frame.size(); ++i) sigma[frame[i]] = replacement[i];
    return subst_rec(*f, std::move(sigma));
}

// --------------------------------------------------------------------------
// Lexer

namespace {

enum class Tok { ident, lparen, rparen, comma, semi, bar, colon, dot, arrow, equals, lbrace,
                 rbrace, eof };

struct Token {
    Tok kind;
    std::string text;
    int line, col;
};

struct Lexer {
    const std::string& src;
    size_t pos = 0;
    int line = 1, col = 1;

    explicit Lexer(const std::string& s) : src(s) {}

    [[noreturn]] void fail(const std::string& msg) const {
        throw invalid_input("line " + std::to_string(line) + ", col " + std::to_string(col) +
                            ": " + msg);
    }

    void advance() {
        if (src[pos] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++pos;
    }

    std::vector<Token> run() {
        std::vector<Token> out;
        while (pos < src.size()) {
            char c = src[pos];
            if (c == '#') {
                while (pos < src.size() && src[pos] != '\n') advance();
                continue;
            }
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
                continue;
            }
            int l = line, co = col;
            auto push = [&](Tok k, std::string text) {
                out.push_back({k, std::move(text), l, co});
            };
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' ||
                std::isdigit(static_cast<unsigned char>(c))) {
                std::string id;
                while (pos < src.size()) {
                    char d = src[pos];
                    if (std::isalnum(static_cast<unsigned char>(d)) || d == '_' || d == '\'') {
                        id += d;
                        advance();
                    } else {
                        break;
                    }
                }
                push(Tok::ident, std::move(id));
                continue;
            }
            switch (c) {
                case '(': push(Tok::lparen, "("); advance(); break;
                case ')': push(Tok::rparen, ")"); advance(); break;
                case ',': push(Tok::comma, ","); advance(); break;
                case ';': push(Tok::semi, ";"); advance(); break;
                case '|': push(Tok::bar, "|"); advance(); break;
                case ':': push(Tok::colon, ":"); advance(); break;
                case '.': push(Tok::dot, "."); advance(); break;
                case '=': push(Tok::equals, "="); advance(); break;
                case '{': push(Tok::lbrace, "{"); advance(); break;
                case '}': push(Tok::rbrace, "}"); advance(); break;
                case '-':
                    advance();
                    if (pos >= src.size() || src[pos] != '>') fail("expected '>' after '-'");
                    advance();
                    push(Tok::arrow, "->");
                    break;
                default: fail(std::string("unexpected character '") + c + "'");
            }
        }
        out.push_back({Tok::eof, "", line, col});
        return out;
    }
};

// --------------------------------------------------------------------------
// Parser

const std::set<std::string> kKeywords = {"forall", "exists", "and", "or",  "not",  "eq",
                                         "equiv",  "indep",  "sort", "rel", "var", "names",
                                         "box",    "diamond"};

struct Parser {
    std::vector<Token> toks;
    size_t pos = 0;

    const Token& peek() const { return toks[pos]; }
    const Token& get() { return toks[pos++]; }

    [[noreturn]] void fail(const Token& t, const std::string& msg) const {
        throw invalid_input("line " + std::to_string(t.line) + ", col " + std::to_string(t.col) +
                            ": " + msg);
    }

    bool at_ident(const char* text = nullptr) const {
        return peek().kind == Tok::ident && (!text || peek().text == text);
    }

    Token expect(Tok k, const std::string& what) {
        if (peek().kind != k) fail(peek(), "expected " + what + ", got '" + peek().text + "'");
        return get();
    }

    std::string expect_name(const std::string& what) {
        const Token& t = peek();
        if (t.kind != Tok::ident) fail(t, "expected " + what + ", got '" + t.text + "'");
        if (kKeywords.count(t.text)) fail(t, "keyword '" + t.text + "' cannot be a " + what);
        return get().text;
    }

    // Possibly-empty comma-separated identifier list.
    std::vector<std::string> ident_list() {
        std::vector<std::string> out;
        if (peek().kind != Tok::ident) return out;
        out.push_back(expect_name("variable"));
        while (peek().kind == Tok::comma) {
            get();
            out.push_back(expect_name("variable"));
        }
        return out;
    }

    FormulaPtr formula() {
        if (at_ident("forall") || at_ident("exists")) {
            bool is_forall = get().text == "forall";
            std::string v = expect_name("variable");
            expect(Tok::colon, "':'");
            std::string s = expect_name("sort");
            expect(Tok::dot, "'.'");
            auto body = formula();
            return is_forall ? f_forall(v, s, std::move(body)) : f_exists(v, s, std::move(body));
        }
        auto lhs = disj();
        if (peek().kind == Tok::arrow) {
            get();
            return f_implies(std::move(lhs), formula());
        }
        return lhs;
    }

    FormulaPtr disj() {
        auto lhs = conj();
        while (at_ident("or")) {
            get();
            lhs = f_or(std::move(lhs), conj());
        }
        return lhs;
    }

    FormulaPtr conj() {
        auto lhs = unary();
        while (at_ident("and")) {
            get();
            lhs = f_and(std::move(lhs), unary());
        }
        return lhs;
    }

    FormulaPtr unary() {
        if (at_ident("not")) {
            get();
            return f_not(unary());
        }
        if (peek().kind == Tok::lparen) {
            get();
            auto f = formula();
            expect(Tok::rparen, "')'");
            return f;
        }
        return atom();
    }

    FormulaPtr atom() {
        const Token& t = peek();
        if (t.kind != Tok::ident) fail(t, "expected a formula, got '" + t.text + "'");
        if (t.text == "eq") {
            get();
            expect(Tok::lparen, "'('");
            std::string a = expect_name("variable");
            expect(Tok::comma, "','");
            std::string b = expect_name("variable");
            expect(Tok::rparen, "')'");
            return f_eq(std::move(a), std::move(b));
        }
        if (t.text == "equiv") {
            get();
            expect(Tok::lparen, "'('");
            auto xs = ident_list();
            expect(Tok::semi, "';'");
            auto ys = ident_list();
            expect(Tok::rparen, "')'");
            if (xs.size() != ys.size())
                fail(t, "equiv vectors have lengths " + std::to_string(xs.size()) + " and " +
                            std::to_string(ys.size()));
            return f_equiv(std::move(xs), std::move(ys));
        }
        if (t.text == "indep") {
            get();
            expect(Tok::lparen, "'('");
            auto xs = ident_list();
            expect(Tok::semi, "';'");
            auto ys = ident_list();
            expect(Tok::bar, "'|'");
            auto zs = ident_list();
            expect(Tok::rparen, "')'");
            return f_indep(std::move(xs), std::move(ys), std::move(zs));
        }
        if (kKeywords.count(t.text)) fail(t, "unexpected keyword '" + t.text + "'");
        // Declared relation applied to variables.
        std::string name = get().text;
        expect(Tok::lparen, "'(' (relation application)");
        auto xs = ident_list();
        expect(Tok::rparen, "')'");
        return f_rel(std::move(name), std::move(xs));
    }
};

} // namespace

FormulaPtr parse_formula(const std::string& text) {
    Parser p{Lexer(text).run()};
    auto f = p.formula();
    if (p.peek().kind != Tok::eof) p.fail(p.peek(), "trailing input after formula");
    return f;
}

ParsedFormulaFile parse_formula_file(const std::string& text) {
    Parser p{Lexer(text).run()};
    ParsedFormulaFile out;
    while (p.at_ident("var")) {
        p.get();
        std::string v = p.expect_name("variable");
        p.expect(Tok::colon, "':'");
        std::string s = p.expect_name("sort");
        for (const auto& [w, _] : out.vars)
            if (w == v) p.fail(p.peek(), "variable '" + v + "' declared twice");
        out.vars.emplace_back(std::move(v), std::move(s));
    }
    out.formula = p.formula();
    if (p.peek().kind != Tok::eof) p.fail(p.peek(), "trailing input after formula");
    return out;
}

Signature parse_signature(const std::string& text) {
    Parser p{Lexer(text).run()};
    Signature sig;
    while (p.peek().kind != Tok::eof) {
        if (p.at_ident("sort")) {
            p.get();
            SortDecl decl;
            decl.name = p.expect_name("sort");
            if (sig.find_sort(decl.name))
                p.fail(p.peek(), "sort '" + decl.name + "' declared twice");
            p.expect(Tok::equals, "'='");
            if (p.peek().kind == Tok::lbrace) {
                p.get();
                std::vector<std::string> atoms;
                if (p.peek().kind == Tok::ident) {
                    atoms.push_back(p.get().text);
                    while (p.peek().kind == Tok::comma) {
                        p.get();
                        atoms.push_back(p.expect(Tok::ident, "a value").text);
                    }
                }
                p.expect(Tok::rbrace, "'}'");
                decl.kind = SortDecl::Kind::enumerated;
                decl.carrier = std::make_shared<SortValueSet>(decl.name, std::move(atoms));
            } else if (p.at_ident("names")) {
                p.get();
                p.expect(Tok::lparen, "'('");
                std::string n = p.expect(Tok::ident, "an arity").text;
                p.expect(Tok::rparen, "')'");
                decl.kind = SortDecl::Kind::names;
                try {
                    decl.name_arity = std::stoi(n);
                } catch (const std::exception&) {
                    p.fail(p.peek(), "names arity must be an integer, got '" + n + "'");
                }
                if (decl.name_arity < 1) p.fail(p.peek(), "names arity must be >= 1");
            } else {
                // Numeric carrier size: values "0".."n-1".
                std::string n = p.expect(Tok::ident, "a carrier").text;
                int size = 0;
                try {
                    size = std::stoi(n);
                } catch (const std::exception&) {
                    p.fail(p.peek(), "carrier must be {..}, names(k) or a size, got '" + n + "'");
                }
                if (size < 1) p.fail(p.peek(), "carrier size must be >= 1");
                std::vector<std::string> atoms;
                for (int i = 0; i < size; ++i) atoms.push_back(std::to_string(i));
                decl.kind = SortDecl::Kind::enumerated;
                decl.carrier = std::make_shared<SortValueSet>(decl.name, std::move(atoms));
            }
            sig.sorts.push_back(std::move(decl));
        } else if (p.at_ident("rel")) {
            p.get();
            RelationDecl decl;
            decl.name = p.expect_name("relation");
            if (sig.find_relation(decl.name))
                p.fail(p.peek(), "relation '" + decl.name + "' declared twice");
            p.expect(Tok::equals, "'='");
            if (p.at_ident("box"))
                decl.mode = RelationDecl::Mode::box;
            else if (p.at_ident("diamond"))
                decl.mode = RelationDecl::Mode::diamond;
            else
                p.fail(p.peek(), "expected 'box' or 'diamond'");
            p.get();
            decl.sort_name = p.expect_name("sort");
            const SortDecl* s = sig.find_sort(decl.sort_name);
            if (!s) p.fail(p.peek(), "relation on undeclared sort '" + decl.sort_name + "'");
            if (s->kind != SortDecl::Kind::enumerated)
                p.fail(p.peek(), "relations need an enumerated sort");
            p.expect(Tok::lbrace, "'{'");
            if (p.peek().kind == Tok::ident) {
                decl.atoms.push_back(p.get().text);
                while (p.peek().kind == Tok::comma) {
                    p.get();
                    decl.atoms.push_back(p.expect(Tok::ident, "a value").text);
                }
            }
            p.expect(Tok::rbrace, "'}'");
            for (const auto& a : decl.atoms)
                if (s->carrier->index_of(a) < 0)
                    p.fail(p.peek(), "relation value '" + a + "' is not in sort '" +
                                         decl.sort_name + "'");
            sig.relations.push_back(std::move(decl));
        } else {
            p.fail(p.peek(), "expected 'sort' or 'rel' declaration");
        }
    }
    return sig;
}

// --------------------------------------------------------------------------
// Printer

namespace {

std::string join(const std::vector<std::string>& vs) {
    std::string out;
    for (size_t i = 0; i < vs.size(); ++i) {
        if (i) out += ",";
        out += vs[i];
    }
    return out;
}

int level(const Formula& f) {
    switch (f.kind) {
        case FKind::Implies:
        case FKind::Exists:
        case FKind::Forall: return 0;
        case FKind::Or: return 1;
        case FKind::And: return 2;
        default: return 3;
    }
}

void print_rec(const Formula& f, int min_level, std::string& out) {
    if (level(f) < min_level) {
        out += "(";
        print_rec(f, 0, out);
        out += ")";
        return;
    }
    switch (f.kind) {
        case FKind::Eq:
            out += "eq(" + f.xs[0] + "," + f.xs[1] + ")";
            return;
        case FKind::Equiv:
            out += "equiv(" + join(f.xs) + " ; " + join(f.ys) + ")";
            return;
        case FKind::Indep:
            out += "indep(" + join(f.xs) + " ; " + join(f.ys) + " | " + join(f.zs) + ")";
            return;
        case FKind::Rel:
            out += f.name + "(" + join(f.xs) + ")";
            return;
        case FKind::Not:
            out += "not ";
            print_rec(*f.lhs, 3, out);
            return;
        case FKind::And:
            print_rec(*f.lhs, 2, out);
            out += " and ";
            print_rec(*f.rhs, 3, out);
            return;
        case FKind::Or:
            print_rec(*f.lhs, 1, out);
            out += " or ";
            print_rec(*f.rhs, 2, out);
            return;
        case FKind::Implies:
            print_rec(*f.lhs, 1, out);
            out += " -> ";
            print_rec(*f.rhs, 0, out);
            return;
        case FKind::Exists:
        case FKind::Forall:
            out += (f.kind == FKind::Forall ? "forall " : "exists ") + f.name + ":" +
                   f.sort_name + ". ";
            print_rec(*f.lhs, 0, out);
            return;
    }
}

} // namespace

std::string print_formula(const Formula& f) {
    std::string out;
    print_rec(f, 0, out);
    return out;
}

// --------------------------------------------------------------------------
// Axiom schemas

namespace {

std::vector<std::string> mkvars(const std::string& prefix, size_t n) {
    std::vector<std::string> out;
    for (size_t i = 1; i <= n; ++i) out.push_back(prefix + std::to_string(i));
    return out;
}

std::vector<std::string> primed(const std::vector<std::string>& vs) {
    std::vector<std::string> out;
    for (const auto& v : vs) out.push_back(v + "'");
    return out;
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

using VarBlock = std::vector<std::pair<std::string, std::string>>; // (var, sort)

VarBlock concat(VarBlock a, const VarBlock& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

VarBlock zip_block(const std::vector<std::string>& vars, const std::vector<std::string>& sorts) {
    VarBlock out;
    for (size_t i = 0; i < vars.size(); ++i) out.emplace_back(vars[i], sorts[i]);
    return out;
}

FormulaPtr close_forall(const VarBlock& block, FormulaPtr body) {
    for (auto it = block.rbegin(); it != block.rend(); ++it)
        body = f_forall(it->first, it->second, std::move(body));
    return body;
}

FormulaPtr close_exists(const VarBlock& block, FormulaPtr body) {
    for (auto it = block.rbegin(); it != block.rend(); ++it)
        body = f_exists(it->first, it->second, std::move(body));
    return body;
}

std::vector<std::string> permute(const std::vector<std::string>& vs, const std::vector<int>& pi,
                                 const std::string& which) {
    if (pi.empty()) return vs; // identity by default
    if (pi.size() != vs.size())
        throw invalid_input("schema: permutation for " + which + " has size " +
                            std::to_string(pi.size()) + ", vector has " +
                            std::to_string(vs.size()));
    std::vector<char> seen(pi.size(), 0);
    for (int i : pi) {
        if (i < 0 || static_cast<size_t>(i) >= pi.size() || seen[static_cast<size_t>(i)])
            throw invalid_input("schema: invalid permutation for " + which);
        seen[static_cast<size_t>(i)] = 1;
    }
    std::vector<std::string> out(vs.size());
    for (size_t i = 0; i < vs.size(); ++i) out[i] = vs[static_cast<size_t>(pi[i])];
    return out;
}

FormulaPtr apply_phi(const SchemaArgs& args, const std::vector<std::string>& replacement) {
    if (!args.phi) throw invalid_input("schema: needs a side formula phi");
    if (args.phi_frame.size() != replacement.size())
        throw invalid_input("schema: phi frame has " + std::to_string(args.phi_frame.size()) +
                            " variables, needs " + std::to_string(replacement.size()));
    return substitute(args.phi, args.phi_frame, replacement);
}

} // namespace

const std::vector<std::string>& all_schema_ids() {
    static const std::vector<std::string> ids = {
        "equiv:A", "equiv:B", "equiv:C", "equiv:D", "equiv:E", "equiv:F", "equiv:G",
        "indep:P", "indep:A", "indep:B", "indep:W", "indep:C", "indep:D", "indep:Z",
        "existence-preservation"};
    return ids;
}

FormulaPtr instantiate_schema(const std::string& id, const SchemaArgs& args) {
    const auto& xs_sorts = args.x_sorts;
    auto xs = mkvars("x", xs_sorts.size());
    auto ys = mkvars("y", args.y_sorts.size());
    auto zs = mkvars("z", args.z_sorts.size());
    auto ws = mkvars("w", args.w_sorts.size());
    auto xblock = zip_block(xs, xs_sorts);
    auto yblock = zip_block(ys, args.y_sorts);
    auto zblock = zip_block(zs, args.z_sorts);
    auto wblock = zip_block(ws, args.w_sorts);

    if (id == "equiv:A") {
        // x~ ~ x~
        return close_forall(xblock, f_equiv(xs, xs));
    }
    if (id == "equiv:B") {
        // x~ ~ y~ -> y~ ~ x~   (y~ has the sorts of x~)
        auto ys2 = mkvars("y", xs.size());
        auto blk = concat(xs, ys2);
        return close_forall(zip_block(blk, concat(xs_sorts, xs_sorts)),
                            f_implies(f_equiv(xs, ys2), f_equiv(ys2, xs)));
    }
    if (id == "equiv:C") {
        auto ys2 = mkvars("y", xs.size());
        auto zs2 = mkvars("z", xs.size());
        auto blk = concat(concat(xs, ys2), zs2);
        auto sorts = concat(concat(xs_sorts, xs_sorts), xs_sorts);
        return close_forall(zip_block(blk, sorts),
                            f_implies(f_and(f_equiv(xs, ys2), f_equiv(ys2, zs2)),
                                      f_equiv(xs, zs2)));
    }
    if (id == "equiv:D") {
        auto ys2 = mkvars("y", xs.size());
        auto blk = concat(xs, ys2);
        return close_forall(zip_block(blk, concat(xs_sorts, xs_sorts)),
                            f_implies(f_equiv(xs, ys2),
                                      f_equiv(permute(xs, args.pi, "x"),
                                              permute(ys2, args.pi, "x"))));
    }
    if (id == "equiv:E") {
        // x~,x ~ y~,y -> x~ ~ y~ : the appended variable's sort is y_sorts[0]
        if (args.y_sorts.size() != 1)
            throw invalid_input("equiv:E needs exactly one appended sort in y_sorts");
        auto ys2 = mkvars("y", xs.size());
        std::string xa = "x" + std::to_string(xs.size() + 1);
        std::string ya = "y" + std::to_string(xs.size() + 1);
        auto blk = concat(concat(xs, {xa}), concat(ys2, {ya}));
        auto sorts = concat(concat(xs_sorts, {args.y_sorts[0]}),
                            concat(xs_sorts, {args.y_sorts[0]}));
        return close_forall(zip_block(blk, sorts),
                            f_implies(f_equiv(concat(xs, {xa}), concat(ys2, {ya})),
                                      f_equiv(xs, ys2)));
    }
    if (id == "equiv:F") {
        // invariance: x~ ~ y~ and phi(x~) -> phi(y~)
        auto ys2 = mkvars("y", xs.size());
        auto blk = concat(xs, ys2);
        return close_forall(zip_block(blk, concat(xs_sorts, xs_sorts)),
                            f_implies(f_and(f_equiv(xs, ys2), apply_phi(args, xs)),
                                      apply_phi(args, ys2)));
    }
    if (id == "equiv:G") {
        // transfer: x~ ~ x~' -> exists y'. x~,y ~ x~',y'
        if (args.y_sorts.size() != 1)
            throw invalid_input("equiv:G needs exactly one sort in y_sorts");
        auto xs2 = primed(xs);
        auto blk = concat(concat(xs, xs2), {"y"});
        auto sorts = concat(concat(xs_sorts, xs_sorts), {args.y_sorts[0]});
        return close_forall(
            zip_block(blk, sorts),
            f_implies(f_equiv(xs, xs2),
                      f_exists("y'", args.y_sorts[0],
                               f_equiv(concat(xs, {"y"}), concat(xs2, {"y'"})))));
    }
    if (id == "indep:P") {
        auto blk = concat(concat(xs, ys), zs);
        auto sorts = concat(concat(xs_sorts, args.y_sorts), args.z_sorts);
        return close_forall(zip_block(blk, sorts),
                            f_implies(f_indep(xs, ys, zs),
                                      f_indep(permute(xs, args.pi, "x"),
                                              permute(ys, args.pi_y, "y"),
                                              permute(zs, args.pi_z, "z"))));
    }
    if (id == "indep:A") {
        auto blk = concat(xs, ys);
        return close_forall(zip_block(blk, concat(xs_sorts, args.y_sorts)),
                            f_indep(xs, ys, ys));
    }
    if (id == "indep:B") {
        auto blk = concat(concat(xs, ys), zs);
        auto sorts = concat(concat(xs_sorts, args.y_sorts), args.z_sorts);
        return close_forall(zip_block(blk, sorts),
                            f_implies(f_indep(xs, ys, zs), f_indep(ys, xs, zs)));
    }
    if (id == "indep:W") {
        auto blk = concat(concat(concat(xs, ys), zs), ws);
        auto sorts = concat(concat(concat(xs_sorts, args.y_sorts), args.z_sorts), args.w_sorts);
        return close_forall(zip_block(blk, sorts),
                            f_implies(f_indep(xs, concat(ys, zs), ws), f_indep(xs, ys, ws)));
    }
    if (id == "indep:C") {
        auto blk = concat(concat(concat(xs, ys), zs), ws);
        auto sorts = concat(concat(concat(xs_sorts, args.y_sorts), args.z_sorts), args.w_sorts);
        return close_forall(zip_block(blk, sorts),
                            f_implies(f_indep(xs, concat(ys, zs), ws),
                                      f_indep(xs, ys, concat(zs, ws))));
    }
    if (id == "indep:D") {
        auto blk = concat(concat(concat(xs, ys), zs), ws);
        auto sorts = concat(concat(concat(xs_sorts, args.y_sorts), args.z_sorts), args.w_sorts);
        return close_forall(zip_block(blk, sorts),
                            f_implies(f_and(f_indep(xs, ys, concat(zs, ws)),
                                            f_indep(xs, zs, ws)),
                                      f_indep(xs, concat(ys, zs), ws)));
    }
    if (id == "indep:Z") {
        // exists y~ with y~,w~ ~ x~,w~ and y~ _||_ z~ | w~ ; y~ copies x~'s sorts
        auto ys2 = mkvars("y", xs.size());
        auto blk = concat(concat(xs, zs), ws);
        auto sorts = concat(concat(xs_sorts, args.z_sorts), args.w_sorts);
        auto body = f_and(f_equiv(concat(ys2, ws), concat(xs, ws)), f_indep(ys2, zs, ws));
        return close_forall(zip_block(blk, sorts),
                            close_exists(zip_block(ys2, xs_sorts), std::move(body)));
    }
    if (id == "existence-preservation") {
        // (exists y~. phi(x~,y~,w~)) ->
        //   forall z~. (x~ _||_ z~ | w~ ->
        //     exists y~. (x~,y~ _||_ z~ | w~ and phi(x~,y~,w~)))
        auto repl = concat(concat(xs, ys), ws);
        auto phi_inst = apply_phi(args, repl);
        auto inner = close_exists(
            yblock, f_and(f_indep(concat(xs, ys), zs, ws), phi_inst));
        auto guarded = close_forall(zblock, f_implies(f_indep(xs, zs, ws), std::move(inner)));
        auto premise = close_exists(yblock, phi_inst);
        return close_forall(concat(xblock, wblock),
                            f_implies(std::move(premise), std::move(guarded)));
    }
    throw invalid_input("unknown schema id '" + id + "'");
}

} // namespace sheaflogic
