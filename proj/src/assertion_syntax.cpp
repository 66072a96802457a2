// Surface syntax of assertions: parser and printer.

#include <cstdio>
#include <map>
#include <sstream>

#include "lexer.hpp"
#include "qimp/assertion.hpp"

namespace qimp {

namespace {

using detail::Tok;
using detail::TokenStream;

const std::set<std::string, std::less<>>& reserved() {
    static const std::set<std::string, std::less<>> k = {"true", "false", "not", "and", "or",  "forall", "exists",
                                                         "in",   "box",   "char", "tr",  "E",   "ind",    "split",
                                                         "on",   "meas"};
    return k;
}

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s = buf;
    // Shortest form that still round-trips.
    for (int digits = 1; digits < 17; ++digits) {
        std::snprintf(buf, sizeof buf, "%.*g", digits, v);
        if (std::stod(buf) == v) {
            s = buf;
            break;
        }
    }
    return s;
}

class AssertionParser {
public:
    AssertionParser(std::string_view text, const AssertionContext* ctx)
        : ts_(text, detail::tokenize(text, {.dollar_idents = true})), ctx_(ctx) {}

    DistAssnPtr parse_document() {
        while (ts_.is_word("meas")) declaration();
        auto p = passn();
        if (!ts_.at_end()) ts_.fail("expected end of assertion");
        return p;
    }

    StateAssnPtr parse_state_only() {
        auto a = sassn();
        if (!ts_.at_end()) ts_.fail("expected end of assertion");
        return a;
    }

private:
    std::string ident(std::string_view what) {
        if (ts_.peek().kind != Tok::Ident || reserved().count(ts_.peek().text)) ts_.fail("expected " + std::string(what));
        return ts_.next().text;
    }

    std::int64_t integer(bool negative) {
        const auto& t = ts_.peek();
        if (t.kind != Tok::Int) ts_.fail("expected integer");
        const auto loc = t.loc;
        const std::string text = (negative ? "-" : "") + ts_.next().text;
        try {
            return std::stoll(text);
        } catch (const std::exception&) {
            throw ParseError("integer literal out of range", loc);
        }
    }

    std::int64_t signed_integer() {
        const bool neg = ts_.accept_sym("-");
        return integer(neg);
    }

    double real(bool negative) {
        const auto& t = ts_.peek();
        if (t.kind != Tok::Int && t.kind != Tok::Real) ts_.fail("expected number");
        const auto loc = t.loc;
        try {
            const double v = std::stod(ts_.next().text);
            return negative ? -v : v;
        } catch (const std::exception&) {
            throw ParseError("number out of range", loc);
        }
    }

    bool at_number(std::size_t ahead = 0) const {
        const auto k = ts_.peek(ahead).kind;
        return k == Tok::Int || k == Tok::Real;
    }

    // --- declarations ---

    void declaration() {
        ts_.expect_word("meas");
        const auto loc = ts_.peek().loc;
        auto name = ident("measurement name");
        if (decls_.count(name)) throw ParseError("measurement '" + name + "' declared twice", loc);
        ts_.expect_sym("=");
        ts_.expect_sym("{");
        std::vector<CMatrix> ops;
        std::vector<Label> labels;
        if (!ts_.is_sym("}")) {
            do {
                Label label{static_cast<std::int64_t>(ops.size())};
                if (ts_.is_sym("[") && !ts_.is_sym("[", 1)) {
                    ts_.next();
                    label.clear();
                    if (!ts_.is_sym("]")) {
                        do label.push_back(signed_integer());
                        while (ts_.accept_sym(","));
                    }
                    ts_.expect_sym("]");
                    ts_.expect_sym(":");
                } else if (at_number() || (ts_.is_sym("-") && at_number(1))) {
                    label = {signed_integer()};
                    ts_.expect_sym(":");
                }
                ops.push_back(detail::parse_matrix_at(ts_));
                labels.push_back(std::move(label));
            } while (ts_.accept_sym(","));
        }
        ts_.expect_sym("}");
        ts_.expect_sym(";");
        try {
            if (ops.empty()) throw std::invalid_argument("no operators");
            const std::size_t arity = qubits_for_dim(ops.front().rows());
            GeneralMeasurement gm(arity, std::move(ops), std::move(labels));
            if (!check_measurement(gm)) throw std::invalid_argument("operators violate completeness");
            decls_.emplace(name, std::make_shared<NamedMeasurement>(NamedMeasurement{name, std::move(gm)}));
        } catch (const std::exception& e) {
            throw ParseError("measurement '" + name + "': " + e.what(), loc);
        }
    }

    MeasurementPtr lookup_measurement(const std::string& name, SourceLoc loc) {
        if (auto it = decls_.find(name); it != decls_.end()) return it->second;
        if (ctx_ && ctx_->program) {
            if (const auto* m = ctx_->program->find_measurement(name)) {
                auto nm = std::make_shared<NamedMeasurement>(NamedMeasurement{name, *m});
                decls_.emplace(name, nm);
                return nm;
            }
        }
        throw ParseError("unknown measurement '" + name + "'", loc);
    }

    // --- distribution assertions ---

    // passn := pimpl ('(+)' pimpl ['split' 'on' sassn])*
    DistAssnPtr passn() {
        auto l = pimpl();
        while (ts_.accept_sym("(+)")) {
            auto r = pimpl();
            StateAssnPtr guard;
            if (ts_.accept_word("split")) {
                ts_.expect_word("on");
                guard = sassn();
            }
            l = DistAssn::oplus(l, r, guard);
        }
        return l;
    }

    DistAssnPtr pimpl() {
        auto l = por();
        if (ts_.accept_sym("->")) return DistAssn::junction(DistAssn::Kind::Implies, l, pimpl());
        return l;
    }

    DistAssnPtr por() {
        auto l = pand();
        while (ts_.accept_word("or")) l = DistAssn::junction(DistAssn::Kind::Or, l, pand());
        return l;
    }

    DistAssnPtr pand() {
        auto l = punary();
        while (ts_.accept_word("and")) l = DistAssn::junction(DistAssn::Kind::And, l, punary());
        return l;
    }

    DistAssnPtr punary() {
        if (ts_.accept_word("not")) return DistAssn::negate(punary());
        if (ts_.is_word("forall") || ts_.is_word("exists")) {
            const auto kind = ts_.next().text == "forall" ? DistAssn::Kind::Forall : DistAssn::Kind::Exists;
            std::string var;
            std::int64_t lo = 0, hi = 0;
            binder(var, lo, hi);
            return DistAssn::quantifier(kind, var, lo, hi, passn());
        }
        return patom();
    }

    void binder(std::string& var, std::int64_t& lo, std::int64_t& hi) {
        var = ident("bound variable");
        if (!ts_.is_word("in")) ts_.fail("quantifiers need a bounded range 'in lo..hi'");
        ts_.next();
        lo = signed_integer();
        ts_.expect_sym("..");
        hi = signed_integer();
        ts_.expect_sym(":");
    }

    DistAssnPtr patom() {
        if (ts_.accept_word("true")) return DistAssn::truth(true);
        if (ts_.accept_word("false")) return DistAssn::truth(false);
        if (ts_.accept_word("box")) {
            ts_.expect_sym("(");
            auto psi = sassn();
            ts_.expect_sym(")");
            return DistAssn::box(psi);
        }
        if (ts_.is_word("char")) return char_literal();
        if (ts_.is_sym("(")) {
            const auto m = ts_.mark();
            try {
                ts_.next();
                auto p = passn();
                ts_.expect_sym(")");
                return p;
            } catch (const ParseError&) {
                ts_.reset(m);
            }
        }
        return pcomparison();
    }

    DistAssnPtr pcomparison() {
        auto l = dexpr();
        if (ts_.accept_sym("=")) return DistAssn::cmp(CmpOp::Eq, l, dexpr());
        if (ts_.accept_sym("<=")) return DistAssn::cmp(CmpOp::Leq, l, dexpr());
        if (ts_.accept_sym("<")) return DistAssn::cmp(CmpOp::Lt, l, dexpr());
        if (ts_.accept_sym("!=")) return DistAssn::negate(DistAssn::cmp(CmpOp::Eq, l, dexpr()));
        ts_.fail("expected a comparison");
    }

    DistAssnPtr char_literal() {
        const auto loc = ts_.peek().loc;
        ts_.expect_word("char");
        if (!ctx_) throw ParseError("characteristic assertion needs a qubit context", loc);
        POVD mu(ctx_->dim());
        ts_.expect_sym("{");
        if (!ts_.is_sym("}")) {
            do {
                ts_.expect_sym("(");
                ClassicalState sigma;
                if (!ts_.is_sym(")")) {
                    do {
                        auto x = ident("classical variable");
                        ts_.expect_sym("=");
                        sigma = sigma.updated(x, signed_integer());
                    } while (ts_.accept_sym(","));
                }
                ts_.expect_sym(")");
                ts_.expect_sym(":");
                const auto mloc = ts_.peek().loc;
                auto rho = detail::parse_matrix_at(ts_);
                if (rho.rows() != mu.dim() || rho.cols() != mu.dim())
                    throw ParseError("state matrix has the wrong dimension", mloc);
                if (auto why = density_violation(rho); !why.empty()) throw ParseError(why, mloc);
                mu.accumulate(sigma, rho);
            } while (ts_.accept_sym(","));
        }
        ts_.expect_sym("}");
        if (total_mass(mu) > 1.0 + kEpsNum) throw ParseError("characteristic POVD has mass above 1", loc);
        return DistAssn::char_eq(std::move(mu));
    }

    // --- distribution expressions ---

    DistExprPtr dexpr() {
        auto l = dterm();
        for (;;) {
            if (ts_.accept_sym("+")) l = DistExpr::binary(DistExpr::Kind::Add, l, dterm());
            else if (ts_.accept_sym("-")) l = DistExpr::binary(DistExpr::Kind::Sub, l, dterm());
            else return l;
        }
    }

    DistExprPtr dterm() {
        const bool neg = ts_.is_sym("-") && at_number(1);
        if (neg || at_number()) {
            if (neg) ts_.next();
            const double v = real(neg);
            if (ts_.accept_sym("*")) return DistExpr::scale(v, dterm());
            return DistExpr::constant(v);
        }
        return dfactor();
    }

    DistExprPtr dfactor() {
        if (ts_.accept_word("tr")) {
            ts_.expect_sym("(");
            auto r = dexpr();
            ts_.expect_sym(")");
            return DistExpr::trace(r);
        }
        if (ts_.accept_sym("(")) {
            auto r = dexpr();
            ts_.expect_sym(")");
            return r;
        }
        ts_.expect_word("E");
        ts_.expect_sym("[");
        const bool measured = ts_.is_sym("~") || (ts_.peek().kind == Tok::Ident && (ts_.is_sym(",", 1) || ts_.is_sym("~", 1)));
        if (!measured) {
            auto e = sexpr();
            ts_.expect_sym("]");
            return DistExpr::expect(e);
        }
        std::vector<std::string> binders;
        if (!ts_.is_sym("~")) {
            do binders.push_back(ident("bound variable"));
            while (ts_.accept_sym(","));
        }
        ts_.expect_sym("~");
        const auto loc = ts_.peek().loc;
        auto m = lookup_measurement(ident("measurement name"), loc);
        ts_.expect_sym("[");
        std::vector<std::string> qs;
        if (!ts_.is_sym("]")) {
            do {
                const auto qloc = ts_.peek().loc;
                auto q = ident("qubit");
                if (ctx_ && std::find(ctx_->qubits.begin(), ctx_->qubits.end(), q) == ctx_->qubits.end())
                    throw ParseError("unknown qubit '" + q + "'", qloc);
                qs.push_back(std::move(q));
            } while (ts_.accept_sym(","));
        }
        ts_.expect_sym("]");
        ts_.expect_sym("]");
        ts_.expect_sym("(");
        auto e = sexpr();
        ts_.expect_sym(")");
        try {
            return DistExpr::mexpect(std::move(binders), m, std::move(qs), e);
        } catch (const std::invalid_argument& ex) {
            throw ParseError(ex.what(), loc);
        }
    }

    // --- state assertions ---

    StateAssnPtr sassn() {
        auto l = sor();
        if (ts_.accept_sym("->")) return StateAssn::junction(StateAssn::Kind::Implies, l, sassn());
        return l;
    }

    StateAssnPtr sor() {
        auto l = sand();
        while (ts_.accept_word("or")) l = StateAssn::junction(StateAssn::Kind::Or, l, sand());
        return l;
    }

    StateAssnPtr sand() {
        auto l = sunary();
        while (ts_.accept_word("and")) l = StateAssn::junction(StateAssn::Kind::And, l, sunary());
        return l;
    }

    StateAssnPtr sunary() {
        if (ts_.accept_word("not")) return StateAssn::negate(sunary());
        if (ts_.is_word("forall") || ts_.is_word("exists")) {
            const auto kind = ts_.next().text == "forall" ? StateAssn::Kind::Forall : StateAssn::Kind::Exists;
            std::string var;
            std::int64_t lo = 0, hi = 0;
            binder(var, lo, hi);
            return StateAssn::quantifier(kind, var, lo, hi, sassn());
        }
        return satom();
    }

    StateAssnPtr satom() {
        if (ts_.accept_word("true")) return StateAssn::truth(true);
        if (ts_.accept_word("false")) return StateAssn::truth(false);
        if (ts_.is_sym("(")) {
            const auto m = ts_.mark();
            try {
                ts_.next();
                auto a = sassn();
                ts_.expect_sym(")");
                return a;
            } catch (const ParseError&) {
                ts_.reset(m);
            }
        }
        auto l = sexpr();
        if (ts_.accept_sym("=")) return StateAssn::cmp(CmpOp::Eq, l, sexpr());
        if (ts_.accept_sym("<=")) return StateAssn::cmp(CmpOp::Leq, l, sexpr());
        if (ts_.accept_sym("<")) return StateAssn::cmp(CmpOp::Lt, l, sexpr());
        if (ts_.accept_sym("!=")) return StateAssn::negate(StateAssn::cmp(CmpOp::Eq, l, sexpr()));
        ts_.fail("expected a comparison");
    }

    StateExprPtr sexpr() {
        auto l = sterm();
        for (;;) {
            if (ts_.accept_sym("+")) l = StateExpr::binary(StateExpr::Kind::Add, l, sterm());
            else if (ts_.accept_sym("-")) l = StateExpr::binary(StateExpr::Kind::Sub, l, sterm());
            else return l;
        }
    }

    StateExprPtr sterm() {
        auto l = sfactor();
        while (ts_.accept_sym("*")) l = StateExpr::binary(StateExpr::Kind::Mul, l, sfactor());
        return l;
    }

    StateExprPtr sfactor() {
        if (ts_.accept_sym("(")) {
            auto e = sexpr();
            ts_.expect_sym(")");
            return e;
        }
        if (ts_.is_sym("-") && ts_.peek(1).kind == Tok::Int) {
            ts_.next();
            return StateExpr::lit(integer(true));
        }
        if (ts_.peek().kind == Tok::Int) return StateExpr::lit(integer(false));
        if (ts_.accept_word("ind")) {
            ts_.expect_sym("(");
            auto a = sassn();
            ts_.expect_sym(")");
            return StateExpr::ind(a);
        }
        return StateExpr::var(ident("state expression"));
    }

    TokenStream ts_;
    const AssertionContext* ctx_;
    std::map<std::string, MeasurementPtr> decls_;
};

// --- printer ---

int sprec(const StateExpr& e) {
    switch (e.kind) {
        case StateExpr::Kind::Add:
        case StateExpr::Kind::Sub: return 1;
        case StateExpr::Kind::Mul: return 2;
        default: return 3;
    }
}

void print_sassn(std::ostream& os, const StateAssn& a);

void print_sexpr(std::ostream& os, const StateExpr& e) {
    switch (e.kind) {
        case StateExpr::Kind::Lit: os << e.value; return;
        case StateExpr::Kind::Var: os << e.name; return;
        case StateExpr::Kind::Ind:
            os << "ind(";
            print_sassn(os, *e.cond);
            os << ')';
            return;
        default: break;
    }
    const int p = sprec(e);
    const bool lp = sprec(*e.lhs) < p;
    const bool rp = sprec(*e.rhs) <= p;
    if (lp) os << '(';
    print_sexpr(os, *e.lhs);
    if (lp) os << ')';
    os << (e.kind == StateExpr::Kind::Add ? " + " : e.kind == StateExpr::Kind::Sub ? " - " : " * ");
    if (rp) os << '(';
    print_sexpr(os, *e.rhs);
    if (rp) os << ')';
}

const char* cmp_text(CmpOp op) {
    switch (op) {
        case CmpOp::Eq: return " = ";
        case CmpOp::Lt: return " < ";
        case CmpOp::Leq: return " <= ";
    }
    return " ? ";
}

int aprec(StateAssn::Kind k) {
    switch (k) {
        case StateAssn::Kind::Implies: return 1;
        case StateAssn::Kind::Or: return 2;
        case StateAssn::Kind::And: return 3;
        case StateAssn::Kind::Not: return 4;
        default: return 5;
    }
}

bool is_neq(const StateAssn& a) {
    return a.kind == StateAssn::Kind::Not && a.a0->kind == StateAssn::Kind::Cmp && a.a0->op == CmpOp::Eq;
}

int aprec(const StateAssn& a) { return is_neq(a) ? 5 : aprec(a.kind); }

void print_sassn_at(std::ostream& os, const StateAssn& a, bool paren) {
    if (paren) os << '(';
    print_sassn(os, a);
    if (paren) os << ')';
}

void print_sassn(std::ostream& os, const StateAssn& a) {
    switch (a.kind) {
        case StateAssn::Kind::True: os << "true"; return;
        case StateAssn::Kind::False: os << "false"; return;
        case StateAssn::Kind::Cmp:
            print_sexpr(os, *a.lhs);
            os << cmp_text(a.op);
            print_sexpr(os, *a.rhs);
            return;
        case StateAssn::Kind::Not:
            if (is_neq(a)) {
                print_sexpr(os, *a.a0->lhs);
                os << " != ";
                print_sexpr(os, *a.a0->rhs);
                return;
            }
            os << "not ";
            print_sassn_at(os, *a.a0, aprec(*a.a0) < 4);
            return;
        case StateAssn::Kind::Forall:
        case StateAssn::Kind::Exists:
            os << '(' << (a.kind == StateAssn::Kind::Forall ? "forall " : "exists ") << a.var << " in " << a.lo
               << ".." << a.hi << ": ";
            print_sassn(os, *a.a0);
            os << ')';
            return;
        case StateAssn::Kind::Implies:
            print_sassn_at(os, *a.a0, aprec(*a.a0) <= 1);
            os << " -> ";
            print_sassn_at(os, *a.a1, aprec(*a.a1) < 1);
            return;
        case StateAssn::Kind::And:
        case StateAssn::Kind::Or: {
            const int p = aprec(a.kind);
            print_sassn_at(os, *a.a0, aprec(*a.a0) < p);
            os << (a.kind == StateAssn::Kind::And ? " and " : " or ");
            print_sassn_at(os, *a.a1, aprec(*a.a1) <= p);
            return;
        }
    }
}

int rprec(const DistExpr& r) {
    switch (r.kind) {
        case DistExpr::Kind::Add:
        case DistExpr::Kind::Sub: return 1;
        case DistExpr::Kind::Scale: return 2;
        case DistExpr::Kind::Const: return r.value < 0 ? 2 : 3;
        default: return 3;
    }
}

void print_dexpr(std::ostream& os, const DistExpr& r) {
    auto list = [&](const std::vector<std::string>& xs) {
        for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? ", " : "") << xs[i];
    };
    switch (r.kind) {
        case DistExpr::Kind::Expect:
            os << "E[";
            print_sexpr(os, *r.body);
            os << ']';
            return;
        case DistExpr::Kind::MExpect:
            os << "E[";
            list(r.binders);
            os << (r.binders.empty() ? "~ " : " ~ ") << r.meas->name << '[';
            list(r.qubits);
            os << "]](";
            print_sexpr(os, *r.body);
            os << ')';
            return;
        case DistExpr::Kind::Const: os << format_real(r.value); return;
        case DistExpr::Kind::Scale: {
            os << format_real(r.value) << " * ";
            const bool paren = rprec(*r.lhs) < 2;
            if (paren) os << '(';
            print_dexpr(os, *r.lhs);
            if (paren) os << ')';
            return;
        }
        case DistExpr::Kind::Trace:
            os << "tr(";
            print_dexpr(os, *r.lhs);
            os << ')';
            return;
        case DistExpr::Kind::Add:
        case DistExpr::Kind::Sub: {
            print_dexpr(os, *r.lhs);
            os << (r.kind == DistExpr::Kind::Add ? " + " : " - ");
            const bool paren = rprec(*r.rhs) <= 1;
            if (paren) os << '(';
            print_dexpr(os, *r.rhs);
            if (paren) os << ')';
            return;
        }
    }
}

bool is_neq(const DistAssn& p) {
    return p.kind == DistAssn::Kind::Not && p.p0->kind == DistAssn::Kind::Cmp && p.p0->op == CmpOp::Eq;
}

int pprec(const DistAssn& p) {
    if (is_neq(p)) return 5;
    switch (p.kind) {
        case DistAssn::Kind::OPlus: return 0;
        case DistAssn::Kind::Implies: return 1;
        case DistAssn::Kind::Or: return 2;
        case DistAssn::Kind::And: return 3;
        case DistAssn::Kind::Not: return 4;
        default: return 5;
    }
}

void print_passn(std::ostream& os, const DistAssn& p);

void print_passn_at(std::ostream& os, const DistAssn& p, bool paren) {
    if (paren) os << '(';
    print_passn(os, p);
    if (paren) os << ')';
}

void print_passn(std::ostream& os, const DistAssn& p) {
    switch (p.kind) {
        case DistAssn::Kind::True: os << "true"; return;
        case DistAssn::Kind::False: os << "false"; return;
        case DistAssn::Kind::Cmp:
            print_dexpr(os, *p.lhs);
            os << cmp_text(p.op);
            print_dexpr(os, *p.rhs);
            return;
        case DistAssn::Kind::Box:
            os << "box(";
            print_sassn(os, *p.guard);
            os << ')';
            return;
        case DistAssn::Kind::CharEq: {
            os << "char {";
            bool first = true;
            for (const auto& [sigma, rho] : p.target->povd.entries()) {
                os << (first ? " (" : ", (");
                first = false;
                bool f2 = true;
                for (const auto& [x, v] : sigma.assignments()) {
                    os << (f2 ? "" : ", ") << x << " = " << v;
                    f2 = false;
                }
                os << "): " << format_matrix(rho);
            }
            os << (first ? "}" : " }");
            return;
        }
        case DistAssn::Kind::Not:
            if (is_neq(p)) {
                print_dexpr(os, *p.p0->lhs);
                os << " != ";
                print_dexpr(os, *p.p0->rhs);
                return;
            }
            os << "not ";
            print_passn_at(os, *p.p0, pprec(*p.p0) < 4);
            return;
        case DistAssn::Kind::Forall:
        case DistAssn::Kind::Exists:
            os << '(' << (p.kind == DistAssn::Kind::Forall ? "forall " : "exists ") << p.var << " in " << p.lo
               << ".." << p.hi << ": ";
            print_passn(os, *p.p0);
            os << ')';
            return;
        case DistAssn::Kind::Implies:
            print_passn_at(os, *p.p0, pprec(*p.p0) <= 1);
            os << " -> ";
            print_passn_at(os, *p.p1, pprec(*p.p1) < 1);
            return;
        case DistAssn::Kind::And:
        case DistAssn::Kind::Or: {
            const int prec = pprec(p);
            print_passn_at(os, *p.p0, pprec(*p.p0) < prec);
            os << (p.kind == DistAssn::Kind::And ? " and " : " or ");
            print_passn_at(os, *p.p1, pprec(*p.p1) <= prec);
            return;
        }
        case DistAssn::Kind::OPlus:
            print_passn(os, *p.p0);
            os << " (+) ";
            print_passn_at(os, *p.p1, pprec(*p.p1) == 0);
            if (p.guard) {
                os << " split on ";
                print_sassn(os, *p.guard);
            }
            return;
    }
}

bool program_provides(const AssertionContext& ctx, const NamedMeasurement& m) {
    if (!ctx.program) return false;
    const auto* pm = ctx.program->find_measurement(m.name);
    return pm && pm->arity == m.meas.arity && pm->labels == m.meas.labels && pm->operators == m.meas.operators;
}

void print_declaration(std::ostream& os, const NamedMeasurement& m) {
    os << "meas " << m.name << " = {";
    for (std::size_t i = 0; i < m.meas.size(); ++i) {
        os << (i ? ",\n  " : "\n  ");
        const auto& l = m.meas.labels[i];
        if (l.size() != 1) {
            os << '[';
            for (std::size_t k = 0; k < l.size(); ++k) os << (k ? ", " : "") << l[k];
            os << "]: ";
        } else if (l.front() != static_cast<std::int64_t>(i)) {
            os << l.front() << ": ";
        }
        os << format_matrix(m.meas.operators[i]);
    }
    os << "\n};\n";
}

}  // namespace

DistAssnPtr parse_assertion(std::string_view text, const AssertionContext& ctx) {
    return AssertionParser(text, &ctx).parse_document();
}

StateAssnPtr parse_state_assertion(std::string_view text) { return AssertionParser(text, nullptr).parse_state_only(); }

std::string pretty(const DistAssn& p, const AssertionContext& ctx) {
    std::ostringstream os;
    std::set<std::string> printed;
    for (const auto& m : measurements_of(p)) {
        if (program_provides(ctx, *m)) continue;
        if (!printed.insert(m->name).second) {
            throw std::invalid_argument("two different measurements share the name '" + m->name + "'");
        }
        print_declaration(os, *m);
    }
    print_passn(os, p);
    return os.str();
}

std::string pretty_body(const DistAssn& p) {
    std::ostringstream os;
    print_passn(os, p);
    return os.str();
}

std::string pretty(const DistExpr& r) {
    std::ostringstream os;
    print_dexpr(os, r);
    return os.str();
}

std::string pretty(const StateAssn& a) {
    std::ostringstream os;
    print_sassn(os, a);
    return os.str();
}

std::string pretty(const StateExpr& e) {
    std::ostringstream os;
    print_sexpr(os, e);
    return os.str();
}

}  // namespace qimp
