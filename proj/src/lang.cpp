#include "qimp/lang.hpp"

#include <algorithm>
#include <charconv>
#include <limits>
#include <sstream>

#include "lexer.hpp"

namespace qimp {

// --- constructors ---

AExpPtr AExp::lit(std::int64_t v) {
    auto a = std::make_shared<AExp>();
    a->kind = Kind::Lit;
    a->value = v;
    return a;
}

AExpPtr AExp::var(std::string name) {
    auto a = std::make_shared<AExp>();
    a->kind = Kind::Var;
    a->name = std::move(name);
    return a;
}

AExpPtr AExp::binary(Kind k, AExpPtr l, AExpPtr r) {
    auto a = std::make_shared<AExp>();
    a->kind = k;
    a->lhs = std::move(l);
    a->rhs = std::move(r);
    return a;
}

BExpPtr BExp::truth(bool v) {
    auto b = std::make_shared<BExp>();
    b->kind = v ? Kind::True : Kind::False;
    return b;
}

BExpPtr BExp::cmp(Kind k, AExpPtr l, AExpPtr r) {
    auto b = std::make_shared<BExp>();
    b->kind = k;
    b->a0 = std::move(l);
    b->a1 = std::move(r);
    return b;
}

BExpPtr BExp::negate(BExpPtr inner) {
    auto b = std::make_shared<BExp>();
    b->kind = Kind::Not;
    b->b0 = std::move(inner);
    return b;
}

BExpPtr BExp::junction(Kind k, BExpPtr l, BExpPtr r) {
    auto b = std::make_shared<BExp>();
    b->kind = k;
    b->b0 = std::move(l);
    b->b1 = std::move(r);
    return b;
}

static std::shared_ptr<Com> make_com(Com::Kind k, SourceLoc loc) {
    auto c = std::make_shared<Com>();
    c->kind = k;
    c->loc = loc;
    return c;
}

ComPtr Com::skip(SourceLoc loc) { return make_com(Kind::Skip, loc); }
ComPtr Com::abort(SourceLoc loc) { return make_com(Kind::Abort, loc); }
ComPtr Com::nil() {
    static const ComPtr n = make_com(Kind::Nil, {});
    return n;
}

ComPtr Com::assign(std::string x, AExpPtr a, SourceLoc loc) {
    auto c = make_com(Kind::Assign, loc);
    c->var = std::move(x);
    c->expr = std::move(a);
    return c;
}

ComPtr Com::seq(ComPtr c0, ComPtr c1) {
    auto c = make_com(Kind::Seq, c0->loc);
    c->first = std::move(c0);
    c->second = std::move(c1);
    return c;
}

ComPtr Com::if_(BExpPtr b, ComPtr c0, ComPtr c1, SourceLoc loc) {
    auto c = make_com(Kind::If, loc);
    c->cond = std::move(b);
    c->first = std::move(c0);
    c->second = std::move(c1);
    return c;
}

ComPtr Com::while_(BExpPtr b, ComPtr body, SourceLoc loc) {
    auto c = make_com(Kind::While, loc);
    c->cond = std::move(b);
    c->first = std::move(body);
    return c;
}

ComPtr Com::qinit(std::string q, SourceLoc loc) {
    auto c = make_com(Kind::QInit, loc);
    c->var = std::move(q);
    return c;
}

ComPtr Com::qunit(std::string gate, std::vector<std::string> qs, SourceLoc loc) {
    auto c = make_com(Kind::QUnit, loc);
    c->op = std::move(gate);
    c->qubits = std::move(qs);
    return c;
}

ComPtr Com::qmeas(std::string x, std::string meas, std::vector<std::string> qs, SourceLoc loc) {
    auto c = make_com(Kind::QMeas, loc);
    c->var = std::move(x);
    c->op = std::move(meas);
    c->qubits = std::move(qs);
    return c;
}

ComPtr seq_chain(const std::vector<ComPtr>& cs) {
    if (cs.empty()) return Com::skip();
    ComPtr acc = cs.back();
    for (auto it = cs.rbegin() + 1; it != cs.rend(); ++it) acc = Com::seq(*it, acc);
    return acc;
}

// --- equality ---

template <class P>
static bool eq_ptr(const P& a, const P& b) {
    if (!a || !b) return a == b;
    return a == b || equal(*a, *b);
}

bool equal(const AExp& a, const AExp& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case AExp::Kind::Lit: return a.value == b.value;
        case AExp::Kind::Var: return a.name == b.name;
        default: return eq_ptr(a.lhs, b.lhs) && eq_ptr(a.rhs, b.rhs);
    }
}

bool equal(const BExp& a, const BExp& b) {
    if (a.kind != b.kind) return false;
    return eq_ptr(a.a0, b.a0) && eq_ptr(a.a1, b.a1) && eq_ptr(a.b0, b.b0) && eq_ptr(a.b1, b.b1);
}

bool equal(const Com& a, const Com& b) {
    if (a.kind != b.kind) return false;
    return a.var == b.var && a.op == b.op && a.qubits == b.qubits && eq_ptr(a.expr, b.expr) &&
           eq_ptr(a.cond, b.cond) && eq_ptr(a.first, b.first) && eq_ptr(a.second, b.second);
}

static bool equal_gate(const UnitaryGate& a, const UnitaryGate& b) { return a.arity == b.arity && a.mat == b.mat; }
static bool equal_meas(const GeneralMeasurement& a, const GeneralMeasurement& b) {
    return a.arity == b.arity && a.operators == b.operators && a.labels == b.labels;
}

bool equal(const Program& a, const Program& b) {
    if (a.qubits != b.qubits || a.declarations != b.declarations) return false;
    if (a.gates.size() != b.gates.size() || a.measurements.size() != b.measurements.size()) return false;
    for (const auto& [name, g] : a.gates) {
        auto it = b.gates.find(name);
        if (it == b.gates.end() || !equal_gate(g, it->second)) return false;
    }
    for (const auto& [name, m] : a.measurements) {
        auto it = b.measurements.find(name);
        if (it == b.measurements.end() || !equal_meas(m, it->second)) return false;
    }
    return eq_ptr(a.body, b.body);
}

// --- program lookups ---

const std::map<std::string, UnitaryGate>& builtin_gates() {
    static const std::map<std::string, UnitaryGate> g = {
        {"I", UnitaryGate(1, gates::I())},       {"H", UnitaryGate(1, gates::H())},
        {"X", UnitaryGate(1, gates::X())},       {"Z", UnitaryGate(1, gates::Z())},
        {"CNOT", UnitaryGate(2, gates::CNOT())},
    };
    return g;
}

const std::map<std::string, GeneralMeasurement>& builtin_measurements() {
    static const std::map<std::string, GeneralMeasurement> m = {{"M", gates::computational()}};
    return m;
}

std::size_t Program::qubit_index(std::string_view q) const {
    for (std::size_t i = 0; i < qubits.size(); ++i)
        if (qubits[i] == q) return i;
    throw std::out_of_range("undeclared quantum variable '" + std::string(q) + "'");
}

std::vector<std::size_t> Program::qubit_indices(const std::vector<std::string>& qs) const {
    std::vector<std::size_t> out;
    out.reserve(qs.size());
    for (const auto& q : qs) out.push_back(qubit_index(q));
    return out;
}

const UnitaryGate* Program::find_gate(std::string_view name) const {
    if (auto it = gates.find(std::string(name)); it != gates.end()) return &it->second;
    const auto& b = builtin_gates();
    if (auto it = b.find(std::string(name)); it != b.end()) return &it->second;
    return nullptr;
}

const GeneralMeasurement* Program::find_measurement(std::string_view name) const {
    if (auto it = measurements.find(std::string(name)); it != measurements.end()) return &it->second;
    const auto& b = builtin_measurements();
    if (auto it = b.find(std::string(name)); it != b.end()) return &it->second;
    return nullptr;
}

// --- free variables ---

void free_vars(const AExp& a, std::set<std::string>& out) {
    switch (a.kind) {
        case AExp::Kind::Lit: break;
        case AExp::Kind::Var: out.insert(a.name); break;
        default:
            free_vars(*a.lhs, out);
            free_vars(*a.rhs, out);
    }
}

void free_vars(const BExp& b, std::set<std::string>& out) {
    if (b.a0) free_vars(*b.a0, out);
    if (b.a1) free_vars(*b.a1, out);
    if (b.b0) free_vars(*b.b0, out);
    if (b.b1) free_vars(*b.b1, out);
}

static void collect_classical(const Com& c, std::set<std::string>& out) {
    switch (c.kind) {
        case Com::Kind::Assign:
            out.insert(c.var);
            free_vars(*c.expr, out);
            break;
        case Com::Kind::QMeas: out.insert(c.var); break;
        case Com::Kind::If:
        case Com::Kind::While: free_vars(*c.cond, out); break;
        default: break;
    }
    if (c.first) collect_classical(*c.first, out);
    if (c.second) collect_classical(*c.second, out);
}

std::set<std::string> classical_vars(const Com& c) {
    std::set<std::string> out;
    collect_classical(c, out);
    return out;
}

std::set<std::string> classical_vars(const Program& p) { return p.body ? classical_vars(*p.body) : std::set<std::string>{}; }

std::vector<std::string> quantum_vars(const Program& p) { return p.qubits; }

bool is_loop_free(const Com& c) {
    if (c.kind == Com::Kind::While) return false;
    if (c.first && !is_loop_free(*c.first)) return false;
    if (c.second && !is_loop_free(*c.second)) return false;
    return true;
}

// --- validation ---

namespace {

bool is_qubit(const Program& p, const std::string& name) {
    return std::find(p.qubits.begin(), p.qubits.end(), name) != p.qubits.end();
}

void check_classical(const Program& p, const std::set<std::string>& names, SourceLoc loc) {
    for (const auto& n : names) {
        if (is_qubit(p, n)) throw ParseError("quantum variable '" + n + "' used in a classical expression", loc);
    }
}

void check_qubit_list(const Program& p, const std::vector<std::string>& qs, SourceLoc loc) {
    for (std::size_t i = 0; i < qs.size(); ++i) {
        if (!is_qubit(p, qs[i])) throw ParseError("undeclared quantum variable '" + qs[i] + "'", loc);
        for (std::size_t j = i + 1; j < qs.size(); ++j)
            if (qs[i] == qs[j]) throw ParseError("quantum variable '" + qs[i] + "' repeated", loc);
    }
}

void validate_com(const Program& p, const Com& c) {
    switch (c.kind) {
        case Com::Kind::Skip:
        case Com::Kind::Abort: break;
        case Com::Kind::Nil: throw ParseError("'nil' is not allowed in source programs", c.loc);
        case Com::Kind::Assign: {
            std::set<std::string> vs{c.var};
            free_vars(*c.expr, vs);
            check_classical(p, vs, c.loc);
            break;
        }
        case Com::Kind::Seq:
            validate_com(p, *c.first);
            validate_com(p, *c.second);
            break;
        case Com::Kind::If:
        case Com::Kind::While: {
            std::set<std::string> vs;
            free_vars(*c.cond, vs);
            check_classical(p, vs, c.loc);
            validate_com(p, *c.first);
            if (c.second) validate_com(p, *c.second);
            break;
        }
        case Com::Kind::QInit: check_qubit_list(p, {c.var}, c.loc); break;
        case Com::Kind::QUnit: {
            const auto* g = p.find_gate(c.op);
            if (!g) throw ParseError("unknown gate '" + c.op + "'", c.loc);
            check_qubit_list(p, c.qubits, c.loc);
            if (g->arity != c.qubits.size()) {
                throw ParseError("gate '" + c.op + "' expects " + std::to_string(g->arity) + " qubit(s), got " +
                                     std::to_string(c.qubits.size()),
                                 c.loc);
            }
            break;
        }
        case Com::Kind::QMeas: {
            const auto* m = p.find_measurement(c.op);
            if (!m) throw ParseError("unknown measurement '" + c.op + "'", c.loc);
            check_classical(p, {c.var}, c.loc);
            check_qubit_list(p, c.qubits, c.loc);
            if (m->arity != c.qubits.size()) {
                throw ParseError("measurement '" + c.op + "' expects " + std::to_string(m->arity) +
                                     " qubit(s), got " + std::to_string(c.qubits.size()),
                                 c.loc);
            }
            if (m->label_width() != 1) {
                throw ParseError("measurement '" + c.op + "' assigned to a single variable needs scalar labels",
                                 c.loc);
            }
            break;
        }
    }
}

}  // namespace

void validate(const Program& p) {
    if (!p.body) throw ParseError("program has no body", {});
    validate_com(p, *p.body);
}

// --- parser ---

namespace {

using detail::Tok;
using detail::TokenStream;

const std::set<std::string>& keywords() {
    static const std::set<std::string> k = {"qubits", "gate", "meas",  "main", "skip", "abort", "nil",
                                            "if",     "then", "else",  "while", "do",  "true",  "false",
                                            "not",    "and",  "or"};
    return k;
}

std::int64_t parse_int_literal(const detail::Token& t, bool negative) {
    std::uint64_t mag = 0;
    auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), mag);
    const std::uint64_t limit = negative ? std::uint64_t{1} << 63 : (std::uint64_t{1} << 63) - 1;
    if (res.ec != std::errc{} || mag > limit) throw ParseError("integer literal out of range", t.loc);
    if (negative) return mag == (std::uint64_t{1} << 63) ? std::numeric_limits<std::int64_t>::min()
                                                          : -static_cast<std::int64_t>(mag);
    return static_cast<std::int64_t>(mag);
}

class ProgramParser {
public:
    explicit ProgramParser(std::string_view src) : ts_(src, detail::tokenize(src)) {}

    Program parse() {
        if (ts_.accept_word("qubits")) {
            do {
                const auto loc = ts_.peek().loc;
                auto q = ident("qubit name");
                if (std::find(prog_.qubits.begin(), prog_.qubits.end(), q) != prog_.qubits.end())
                    throw ParseError("qubit '" + q + "' declared twice", loc);
                prog_.qubits.push_back(q);
            } while (ts_.accept_sym(","));
            ts_.expect_sym(";");
        }
        while (ts_.is_word("gate") || ts_.is_word("meas")) declaration();
        ts_.expect_word("main");
        prog_.body = block();
        if (!ts_.at_end()) ts_.fail("expected end of program");
        validate(prog_);
        return std::move(prog_);
    }

private:
    std::string ident(std::string_view what) {
        if (ts_.peek().kind != Tok::Ident || keywords().count(ts_.peek().text)) ts_.fail("expected " + std::string(what));
        return ts_.next().text;
    }

    void check_fresh_name(const std::string& name, SourceLoc loc) {
        if (prog_.find_gate(name) || prog_.find_measurement(name) ||
            std::find(prog_.qubits.begin(), prog_.qubits.end(), name) != prog_.qubits.end()) {
            throw ParseError("name '" + name + "' is already defined", loc);
        }
    }

    void declaration() {
        const bool is_gate = ts_.is_word("gate");
        ts_.next();
        const auto loc = ts_.peek().loc;
        auto name = ident("declaration name");
        check_fresh_name(name, loc);
        ts_.expect_sym("=");
        if (is_gate) {
            const auto mloc = ts_.peek().loc;
            CMatrix m = detail::parse_matrix_at(ts_);
            try {
                const std::size_t arity = qubits_for_dim(m.rows());
                prog_.gates.emplace(name, UnitaryGate(arity, std::move(m)));
            } catch (const std::exception& e) {
                throw ParseError("gate '" + name + "': " + e.what(), mloc);
            }
            prog_.declarations.emplace_back(DeclKind::Gate, name);
        } else {
            ts_.expect_sym("{");
            std::vector<CMatrix> ops;
            std::vector<Label> labels;
            do {
                std::int64_t label = static_cast<std::int64_t>(ops.size());
                const bool neg = ts_.is_sym("-") && ts_.peek(1).kind == Tok::Int && ts_.is_sym(":", 2);
                if ((ts_.peek().kind == Tok::Int && ts_.is_sym(":", 1)) || neg) {
                    if (neg) ts_.next();
                    label = parse_int_literal(ts_.next(), neg);
                    ts_.expect_sym(":");
                }
                ops.push_back(detail::parse_matrix_at(ts_));
                labels.push_back({label});
            } while (ts_.accept_sym(","));
            ts_.expect_sym("}");
            try {
                if (ops.empty()) throw std::invalid_argument("no operators");
                const std::size_t arity = qubits_for_dim(ops.front().rows());
                GeneralMeasurement gm(arity, std::move(ops), std::move(labels));
                if (!check_measurement(gm)) throw std::invalid_argument("operators violate completeness");
                prog_.measurements.emplace(name, std::move(gm));
            } catch (const std::exception& e) {
                throw ParseError("measurement '" + name + "': " + e.what(), loc);
            }
            prog_.declarations.emplace_back(DeclKind::Measurement, name);
        }
        ts_.expect_sym(";");
    }

    ComPtr block() {
        ts_.expect_sym("{");
        auto c = statements();
        ts_.expect_sym("}");
        return c;
    }

    ComPtr statements() {
        std::vector<ComPtr> cs;
        cs.push_back(statement());
        while (ts_.accept_sym(";")) {
            if (ts_.is_sym("}")) break;
            cs.push_back(statement());
        }
        return seq_chain(cs);
    }

    std::vector<std::string> qubit_args() {
        ts_.expect_sym("[");
        std::vector<std::string> qs;
        do {
            qs.push_back(ident("quantum variable"));
        } while (ts_.accept_sym(","));
        ts_.expect_sym("]");
        return qs;
    }

    ComPtr statement() {
        const SourceLoc loc = ts_.peek().loc;
        if (ts_.is_sym("{")) return block();
        if (ts_.accept_word("skip")) return Com::skip(loc);
        if (ts_.accept_word("abort")) return Com::abort(loc);
        if (ts_.is_word("nil")) throw ParseError("'nil' is not allowed in source programs", loc);
        if (ts_.accept_word("if")) {
            auto b = bexp();
            ts_.expect_word("then");
            auto c0 = block();
            ComPtr c1 = ts_.accept_word("else") ? block() : Com::skip(loc);
            return Com::if_(b, c0, c1, loc);
        }
        if (ts_.accept_word("while")) {
            auto b = bexp();
            ts_.expect_word("do");
            return Com::while_(b, block(), loc);
        }
        if (ts_.peek().kind != Tok::Ident || keywords().count(ts_.peek().text)) ts_.fail("expected a statement");
        auto name = ts_.next().text;
        if (ts_.is_sym("[")) {
            auto qs = qubit_args();
            auto c = Com::qunit(name, qs, loc);
            validate_com(prog_, *c);
            return c;
        }
        ts_.expect_sym(":=");
        if (ts_.is_sym("|0>")) {
            ts_.next();
            auto c = Com::qinit(name, loc);
            validate_com(prog_, *c);
            return c;
        }
        if (ts_.peek().kind == Tok::Ident && ts_.is_sym("[", 1)) {
            auto meas = ts_.next().text;
            auto qs = qubit_args();
            auto c = Com::qmeas(name, meas, qs, loc);
            validate_com(prog_, *c);
            return c;
        }
        if (ts_.is_sym(";") || ts_.is_sym("}") || ts_.at_end()) ts_.fail("expected an expression after ':='");
        auto c = Com::assign(name, aexp(), loc);
        validate_com(prog_, *c);
        return c;
    }

    // aexp := term (('+'|'-') term)*
    AExpPtr aexp() {
        auto l = aterm();
        while (ts_.is_sym("+") || ts_.is_sym("-")) {
            const auto k = ts_.next().text == "+" ? AExp::Kind::Add : AExp::Kind::Sub;
            l = AExp::binary(k, l, aterm());
        }
        return l;
    }

    AExpPtr aterm() {
        auto l = afactor();
        while (ts_.accept_sym("*")) l = AExp::binary(AExp::Kind::Mul, l, afactor());
        return l;
    }

    AExpPtr afactor() {
        if (ts_.accept_sym("(")) {
            auto a = aexp();
            ts_.expect_sym(")");
            return a;
        }
        if (ts_.is_sym("-") && ts_.peek(1).kind == Tok::Int) {
            ts_.next();
            return AExp::lit(parse_int_literal(ts_.next(), true));
        }
        if (ts_.peek().kind == Tok::Int) return AExp::lit(parse_int_literal(ts_.next(), false));
        const auto loc = ts_.peek().loc;
        auto name = ident("arithmetic expression");
        if (std::find(prog_.qubits.begin(), prog_.qubits.end(), name) != prog_.qubits.end())
            throw ParseError("quantum variable '" + name + "' used in a classical expression", loc);
        return AExp::var(name);
    }

    // bexp := conj ('or' conj)*
    BExpPtr bexp() {
        auto l = bconj();
        while (ts_.accept_word("or")) l = BExp::junction(BExp::Kind::Or, l, bconj());
        return l;
    }

    BExpPtr bconj() {
        auto l = bunary();
        while (ts_.accept_word("and")) l = BExp::junction(BExp::Kind::And, l, bunary());
        return l;
    }

    BExpPtr bunary() {
        if (ts_.accept_word("not")) return BExp::negate(bunary());
        return batom();
    }

    BExpPtr batom() {
        if (ts_.accept_word("true")) return BExp::truth(true);
        if (ts_.accept_word("false")) return BExp::truth(false);
        if (ts_.is_sym("(")) {
            // Either a parenthesised boolean or an arithmetic operand of a comparison.
            const auto m = ts_.mark();
            try {
                return comparison();
            } catch (const ParseError&) {
                ts_.reset(m);
            }
            ts_.expect_sym("(");
            auto b = bexp();
            ts_.expect_sym(")");
            return b;
        }
        return comparison();
    }

    BExpPtr comparison() {
        auto l = aexp();
        if (ts_.accept_sym("=")) return BExp::cmp(BExp::Kind::Eq, l, aexp());
        if (ts_.accept_sym("<=")) return BExp::cmp(BExp::Kind::Leq, l, aexp());
        ts_.fail("expected '=' or '<='");
    }

    TokenStream ts_;
    Program prog_;
};

}  // namespace

Program parse_program(std::string_view text) { return ProgramParser(text).parse(); }

// --- printer ---

namespace {

int aprec(const AExp& a) {
    switch (a.kind) {
        case AExp::Kind::Add:
        case AExp::Kind::Sub: return 1;
        case AExp::Kind::Mul: return 2;
        default: return 3;
    }
}

void print_aexp(std::ostream& os, const AExp& a) {
    switch (a.kind) {
        case AExp::Kind::Lit: os << a.value; return;
        case AExp::Kind::Var: os << a.name; return;
        default: break;
    }
    const int p = aprec(a);
    const bool lp = aprec(*a.lhs) < p;
    const bool rp = aprec(*a.rhs) <= p;
    if (lp) os << '(';
    print_aexp(os, *a.lhs);
    if (lp) os << ')';
    os << (a.kind == AExp::Kind::Add ? " + " : a.kind == AExp::Kind::Sub ? " - " : " * ");
    if (rp) os << '(';
    print_aexp(os, *a.rhs);
    if (rp) os << ')';
}

int bprec(const BExp& b) {
    switch (b.kind) {
        case BExp::Kind::Or: return 1;
        case BExp::Kind::And: return 2;
        case BExp::Kind::Not: return 3;
        default: return 4;
    }
}

void print_bexp(std::ostream& os, const BExp& b) {
    switch (b.kind) {
        case BExp::Kind::True: os << "true"; return;
        case BExp::Kind::False: os << "false"; return;
        case BExp::Kind::Eq:
        case BExp::Kind::Leq:
            print_aexp(os, *b.a0);
            os << (b.kind == BExp::Kind::Eq ? " = " : " <= ");
            print_aexp(os, *b.a1);
            return;
        case BExp::Kind::Not: {
            os << "not ";
            const bool paren = bprec(*b.b0) < 3;
            if (paren) os << '(';
            print_bexp(os, *b.b0);
            if (paren) os << ')';
            return;
        }
        case BExp::Kind::And:
        case BExp::Kind::Or: {
            const int p = bprec(b);
            const bool lp = bprec(*b.b0) < p;
            const bool rp = bprec(*b.b1) <= p;
            if (lp) os << '(';
            print_bexp(os, *b.b0);
            if (lp) os << ')';
            os << (b.kind == BExp::Kind::And ? " and " : " or ");
            if (rp) os << '(';
            print_bexp(os, *b.b1);
            if (rp) os << ')';
            return;
        }
    }
}

void print_qubits(std::ostream& os, const std::vector<std::string>& qs) {
    os << '[';
    for (std::size_t i = 0; i < qs.size(); ++i) os << (i ? ", " : "") << qs[i];
    os << ']';
}

void indent(std::ostream& os, int depth) {
    for (int i = 0; i < depth; ++i) os << "  ";
}

void print_stmts(std::ostream& os, const Com& c, int depth);

void print_block(std::ostream& os, const Com& c, int depth) {
    os << "{\n";
    print_stmts(os, c, depth + 1);
    os << '\n';
    indent(os, depth);
    os << '}';
}

void print_stmt(std::ostream& os, const Com& c, int depth) {
    indent(os, depth);
    switch (c.kind) {
        case Com::Kind::Skip: os << "skip"; break;
        case Com::Kind::Abort: os << "abort"; break;
        case Com::Kind::Nil: os << "nil"; break;
        case Com::Kind::Assign:
            os << c.var << " := ";
            print_aexp(os, *c.expr);
            break;
        case Com::Kind::QInit: os << c.var << " := |0>"; break;
        case Com::Kind::QUnit:
            os << c.op;
            print_qubits(os, c.qubits);
            break;
        case Com::Kind::QMeas:
            os << c.var << " := " << c.op;
            print_qubits(os, c.qubits);
            break;
        case Com::Kind::If:
            os << "if ";
            print_bexp(os, *c.cond);
            os << " then ";
            print_block(os, *c.first, depth);
            if (c.second->kind != Com::Kind::Skip) {
                os << " else ";
                print_block(os, *c.second, depth);
            }
            break;
        case Com::Kind::While:
            os << "while ";
            print_bexp(os, *c.cond);
            os << " do ";
            print_block(os, *c.first, depth);
            break;
        case Com::Kind::Seq:
            // A left-nested sequence is printed as an explicit block.
            print_block(os, c, depth);
            break;
    }
}

void print_stmts(std::ostream& os, const Com& c, int depth) {
    if (c.kind != Com::Kind::Seq) {
        print_stmt(os, c, depth);
        return;
    }
    print_stmt(os, *c.first, depth);
    os << ";\n";
    print_stmts(os, *c.second, depth);
}

}  // namespace

std::string pretty(const AExp& a) {
    std::ostringstream os;
    print_aexp(os, a);
    return os.str();
}

std::string pretty(const BExp& b) {
    std::ostringstream os;
    print_bexp(os, b);
    return os.str();
}

std::string pretty(const Com& c) {
    std::ostringstream os;
    print_stmts(os, c, 0);
    return os.str();
}

std::string pretty(const Program& p) {
    std::ostringstream os;
    if (!p.qubits.empty()) {
        os << "qubits ";
        for (std::size_t i = 0; i < p.qubits.size(); ++i) os << (i ? ", " : "") << p.qubits[i];
        os << ";\n";
    }
    for (const auto& [kind, name] : p.declarations) {
        if (kind == DeclKind::Gate) {
            os << "gate " << name << " = " << format_matrix(p.gates.at(name).mat) << ";\n";
        } else {
            const auto& m = p.measurements.at(name);
            os << "meas " << name << " = {";
            for (std::size_t i = 0; i < m.size(); ++i) {
                os << (i ? ",\n  " : "\n  ");
                if (m.labels[i].front() != static_cast<std::int64_t>(i)) os << m.labels[i].front() << ": ";
                os << format_matrix(m.operators[i]);
            }
            os << "\n};\n";
        }
    }
    os << "main {\n";
    print_stmts(os, *p.body, 1);
    os << "\n}\n";
    return os.str();
}

}  // namespace qimp
