#include "qimp/wp.hpp"

#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace qimp {

// --- fresh names ---

namespace {
std::atomic<unsigned long> g_fresh_vars{0};
std::atomic<unsigned long> g_fresh_meas{0};
}  // namespace

std::string fresh_var() { return "$f" + std::to_string(++g_fresh_vars); }
std::string fresh_measurement_name() { return "$m" + std::to_string(++g_fresh_meas); }

void reset_fresh_names() {
    g_fresh_vars = 0;
    g_fresh_meas = 0;
}

// --- classical substitution ---

namespace {

using Names = std::set<std::string>;

StateAssnPtr sub_a(const StateAssnPtr& psi, const std::string& x, const StateExprPtr& a, const Names& fva);

StateExprPtr sub_e(const StateExprPtr& e, const std::string& x, const StateExprPtr& a, const Names& fva) {
    switch (e->kind) {
        case StateExpr::Kind::Lit: return e;
        case StateExpr::Kind::Var: return e->name == x ? a : e;
        case StateExpr::Kind::Ind: return StateExpr::ind(sub_a(e->cond, x, a, fva));
        default: return StateExpr::binary(e->kind, sub_e(e->lhs, x, a, fva), sub_e(e->rhs, x, a, fva));
    }
}

StateExprPtr var_ref(const std::string& v) { return StateExpr::var(v); }

StateAssnPtr sub_a(const StateAssnPtr& psi, const std::string& x, const StateExprPtr& a, const Names& fva) {
    using K = StateAssn::Kind;
    switch (psi->kind) {
        case K::True:
        case K::False: return psi;
        case K::Cmp: return StateAssn::cmp(psi->op, sub_e(psi->lhs, x, a, fva), sub_e(psi->rhs, x, a, fva));
        case K::Not: return StateAssn::negate(sub_a(psi->a0, x, a, fva));
        case K::Forall:
        case K::Exists: {
            if (psi->var == x) return psi;
            std::string v = psi->var;
            StateAssnPtr body = psi->a0;
            if (fva.count(v)) {
                const auto renamed = fresh_var();
                body = sub_a(body, v, var_ref(renamed), {renamed});
                v = renamed;
            }
            return StateAssn::quantifier(psi->kind, v, psi->lo, psi->hi, sub_a(body, x, a, fva));
        }
        default: return StateAssn::junction(psi->kind, sub_a(psi->a0, x, a, fva), sub_a(psi->a1, x, a, fva));
    }
}

DistExprPtr sub_r(const DistExprPtr& r, const std::string& x, const StateExprPtr& a, const Names& fva) {
    using K = DistExpr::Kind;
    switch (r->kind) {
        case K::Expect: return DistExpr::expect(sub_e(r->body, x, a, fva));
        case K::MExpect: {
            if (std::find(r->binders.begin(), r->binders.end(), x) != r->binders.end()) return r;
            auto binders = r->binders;
            auto body = r->body;
            for (auto& b : binders) {
                if (!fva.count(b)) continue;
                const auto renamed = fresh_var();
                body = sub_e(body, b, var_ref(renamed), {renamed});
                b = renamed;
            }
            return DistExpr::mexpect(std::move(binders), r->meas, r->qubits, sub_e(body, x, a, fva));
        }
        case K::Const: return r;
        case K::Scale: return DistExpr::scale(r->value, sub_r(r->lhs, x, a, fva));
        case K::Trace: return DistExpr::trace(sub_r(r->lhs, x, a, fva));
        default: return DistExpr::binary(r->kind, sub_r(r->lhs, x, a, fva), sub_r(r->rhs, x, a, fva));
    }
}

DistAssnPtr sub_p(const DistAssnPtr& p, const std::string& x, const StateExprPtr& a, const Names& fva) {
    using K = DistAssn::Kind;
    switch (p->kind) {
        case K::True:
        case K::False: return p;
        case K::Cmp: return DistAssn::cmp(p->op, sub_r(p->lhs, x, a, fva), sub_r(p->rhs, x, a, fva));
        case K::Box: return DistAssn::box(sub_a(p->guard, x, a, fva));
        case K::CharEq: throw SubstitutionError("characteristic assertions do not support substitution");
        case K::OPlus:
            return DistAssn::oplus(sub_p(p->p0, x, a, fva), sub_p(p->p1, x, a, fva),
                                   p->guard ? sub_a(p->guard, x, a, fva) : nullptr);
        case K::Not: return DistAssn::negate(sub_p(p->p0, x, a, fva));
        case K::Forall:
        case K::Exists: {
            if (p->var == x) return p;
            std::string v = p->var;
            DistAssnPtr body = p->p0;
            if (fva.count(v)) {
                const auto renamed = fresh_var();
                body = sub_p(body, v, var_ref(renamed), {renamed});
                v = renamed;
            }
            return DistAssn::quantifier(p->kind, v, p->lo, p->hi, sub_p(body, x, a, fva));
        }
        default: return DistAssn::junction(p->kind, sub_p(p->p0, x, a, fva), sub_p(p->p1, x, a, fva));
    }
}

void check_capture(const std::set<std::string>& bound, const std::string& x, const Names& fva) {
    if (bound.count(x)) throw SubstitutionError("'" + x + "' is a bound variable of the assertion");
    for (const auto& v : fva)
        if (bound.count(v)) throw SubstitutionError("substituting would capture '" + v + "'");
}

void collect_bound_r(const DistExpr& r, std::set<std::string>& out) {
    // Binders of measured expectations and quantifiers inside state expressions.
    const auto p = DistAssn::cmp(CmpOp::Eq, std::make_shared<DistExpr>(r), DistExpr::constant(0));
    const auto b = bound_vars(*p);
    out.insert(b.begin(), b.end());
}

}  // namespace

DistAssnPtr subst_assign(const DistAssnPtr& p, const AExp& a, const std::string& x, CaptureMode mode) {
    const auto e = to_state_expr(a);
    const auto fva = free_vars(*e);
    if (mode == CaptureMode::Strict) check_capture(bound_vars(*p), x, fva);
    return sub_p(p, x, e, fva);
}

DistExprPtr subst_assign(const DistExprPtr& r, const AExp& a, const std::string& x, CaptureMode mode) {
    const auto e = to_state_expr(a);
    const auto fva = free_vars(*e);
    if (mode == CaptureMode::Strict) {
        std::set<std::string> bound;
        collect_bound_r(*r, bound);
        check_capture(bound, x, fva);
    }
    return sub_r(r, x, e, fva);
}

// --- quantum substitutions ---

namespace {

bool identity_placement(const std::vector<std::size_t>& idx, std::size_t n) {
    if (idx.size() != n) return false;
    for (std::size_t i = 0; i < n; ++i)
        if (idx[i] != i) return false;
    return true;
}

class QuantumRewriter {
public:
    explicit QuantumRewriter(const AssertionContext& ctx) : ctx_(ctx) {}
    virtual ~QuantumRewriter() = default;

    DistExprPtr expr(const DistExprPtr& r) {
        using K = DistExpr::Kind;
        switch (r->kind) {
            case K::Expect: return on_expect(*r);
            case K::MExpect: return on_mexpect(*r);
            case K::Const: return r;
            case K::Scale: return DistExpr::scale(r->value, expr(r->lhs));
            case K::Trace: return DistExpr::trace(expr(r->lhs));
            default: {
                // Left before right so fresh names are numbered in reading order.
                auto lhs = expr(r->lhs);
                return DistExpr::binary(r->kind, lhs, expr(r->rhs));
            }
        }
    }

    DistAssnPtr assn(const DistAssnPtr& p) {
        using K = DistAssn::Kind;
        switch (p->kind) {
            case K::True:
            case K::False: return p;
            case K::Cmp: {
                auto lhs = expr(p->lhs);
                return DistAssn::cmp(p->op, lhs, expr(p->rhs));
            }
            case K::Box: return on_box(p);
            case K::CharEq: return on_char(p);
            case K::OPlus: return on_oplus(p);
            case K::Forall:
            case K::Exists: return on_quantifier(p);
            case K::Not: return DistAssn::negate(assn(p->p0));
            default: {
                auto lhs = assn(p->p0);
                return DistAssn::junction(p->kind, lhs, assn(p->p1));
            }
        }
    }

protected:
    virtual DistExprPtr on_expect(const DistExpr& r) = 0;
    virtual DistExprPtr on_mexpect(const DistExpr& r) = 0;
    virtual DistAssnPtr on_box(const DistAssnPtr& p) { return p; }
    virtual DistAssnPtr on_char(const DistAssnPtr&) {
        throw SubstitutionError("characteristic assertions do not support substitution");
    }
    virtual DistAssnPtr on_oplus(const DistAssnPtr& p) {
        auto lhs = assn(p->p0);
        return DistAssn::oplus(lhs, assn(p->p1), p->guard);
    }
    virtual DistAssnPtr on_quantifier(const DistAssnPtr& p) {
        return DistAssn::quantifier(p->kind, p->var, p->lo, p->hi, assn(p->p0));
    }

    std::size_t n() const { return ctx_.qubits.size(); }

    /// The measurement of r lifted to the whole register.
    GeneralMeasurement lifted(const DistExpr& r) const {
        const auto idx = ctx_.indices(r.qubits);
        if (identity_placement(idx, n())) return r.meas->meas;
        return embed(r.meas->meas, idx, n());
    }

    CMatrix lifted(const CMatrix& op, const std::vector<std::string>& qs) const {
        const auto idx = ctx_.indices(qs);
        if (identity_placement(idx, n())) return op;
        return embed(op, idx, n());
    }

    /// One generated measurement per (source measurement, placement, variant).
    template <class Build>
    MeasurementPtr memo(const DistExpr& r, int variant, Build build) {
        auto key = std::make_tuple(r.meas.get(), r.qubits, variant);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        auto m = std::make_shared<NamedMeasurement>(NamedMeasurement{fresh_measurement_name(), build()});
        memo_.emplace(std::move(key), m);
        return m;
    }

    const AssertionContext& ctx_;

private:
    std::map<std::tuple<const NamedMeasurement*, std::vector<std::string>, int>, MeasurementPtr> memo_;
};

class InitRewriter : public QuantumRewriter {
public:
    InitRewriter(const AssertionContext& ctx, std::string q) : QuantumRewriter(ctx), q_(std::move(q)) {
        ctx.indices({q_});
    }

protected:
    DistExprPtr on_expect(const DistExpr& r) override {
        if (!local_) {
            GeneralMeasurement m(1, {CMatrix::basis_op(2, 0, 0), CMatrix::basis_op(2, 0, 1)}, {{0}, {1}});
            local_ = std::make_shared<NamedMeasurement>(NamedMeasurement{fresh_measurement_name(), std::move(m)});
        }
        return DistExpr::mexpect({fresh_var()}, local_, {q_}, r.body);
    }

    DistExprPtr on_mexpect(const DistExpr& r) override {
        auto m = memo(r, 0, [&] {
            const auto full = lifted(r);
            const CMatrix k0 = lifted(CMatrix::basis_op(2, 0, 0), {q_});
            const CMatrix k1 = lifted(CMatrix::basis_op(2, 0, 1), {q_});
            std::vector<CMatrix> ops;
            std::vector<Label> labels;
            for (std::size_t i = 0; i < full.size(); ++i) {
                ops.push_back(full.operators[i] * k0);
                ops.push_back(full.operators[i] * k1);
                labels.push_back(full.labels[i]);
                labels.push_back(full.labels[i]);
            }
            return GeneralMeasurement(n(), std::move(ops), std::move(labels));
        });
        return DistExpr::mexpect(r.binders, m, ctx_.qubits, r.body);
    }

private:
    std::string q_;
    MeasurementPtr local_;
};

class GateRewriter : public QuantumRewriter {
public:
    GateRewriter(const AssertionContext& ctx, const UnitaryGate& u, std::vector<std::string> qs)
        : QuantumRewriter(ctx), u_(u), qs_(std::move(qs)) {
        if (u_.arity != qs_.size()) {
            throw SubstitutionError("gate acts on " + std::to_string(u_.arity) + " qubits, given " +
                                    std::to_string(qs_.size()));
        }
        ctx.indices(qs_);
    }

protected:
    DistExprPtr on_expect(const DistExpr& r) override {
        if (!local_) {
            GeneralMeasurement m(u_.arity, {u_.mat}, {{0}});
            local_ = std::make_shared<NamedMeasurement>(NamedMeasurement{fresh_measurement_name(), std::move(m)});
        }
        return DistExpr::mexpect({fresh_var()}, local_, qs_, r.body);
    }

    DistExprPtr on_mexpect(const DistExpr& r) override {
        auto m = memo(r, 0, [&] {
            auto full = lifted(r);
            const CMatrix u = lifted(u_.mat, qs_);
            for (auto& op : full.operators) op = op * u;
            full.arity = n();
            return full;
        });
        return DistExpr::mexpect(r.binders, m, ctx_.qubits, r.body);
    }

private:
    const UnitaryGate& u_;
    std::vector<std::string> qs_;
    MeasurementPtr local_;
};

class MeasureRewriter : public QuantumRewriter {
public:
    MeasureRewriter(const AssertionContext& ctx, std::string x, MeasurementPtr m, std::vector<std::string> qs)
        : QuantumRewriter(ctx), x_(std::move(x)), m_(std::move(m)), qs_(std::move(qs)) {
        if (m_->meas.label_width() != 1) throw SubstitutionError("measurement assigned to one variable needs scalar labels");
        if (m_->meas.arity != qs_.size()) throw SubstitutionError("measurement arity does not match its qubits");
        ctx.indices(qs_);
    }

protected:
    DistExprPtr on_expect(const DistExpr& r) override { return DistExpr::mexpect({x_}, m_, qs_, r.body); }

    DistExprPtr on_mexpect(const DistExpr& r) override {
        const bool rebinds = std::find(r.binders.begin(), r.binders.end(), x_) != r.binders.end();
        auto m = memo(r, rebinds ? 1 : 0, [&] {
            const auto inner = lifted(r);
            const auto outer = embed(m_->meas, ctx_.indices(qs_), n());
            std::vector<CMatrix> ops;
            std::vector<Label> labels;
            for (std::size_t i = 0; i < outer.size(); ++i) {
                for (std::size_t j = 0; j < inner.size(); ++j) {
                    ops.push_back(inner.operators[j] * outer.operators[i]);
                    Label l;
                    if (!rebinds) l = outer.labels[i];
                    l.insert(l.end(), inner.labels[j].begin(), inner.labels[j].end());
                    labels.push_back(std::move(l));
                }
            }
            return GeneralMeasurement(n(), std::move(ops), std::move(labels));
        });
        std::vector<std::string> binders;
        if (!rebinds) binders.push_back(x_);
        binders.insert(binders.end(), r.binders.begin(), r.binders.end());
        return DistExpr::mexpect(std::move(binders), m, ctx_.qubits, r.body);
    }

    DistAssnPtr on_box(const DistAssnPtr& p) override {
        return DistAssn::cmp(CmpOp::Eq, DistExpr::mexpect({x_}, m_, qs_, StateExpr::ind(p->guard)),
                             DistExpr::mexpect({x_}, m_, qs_, StateExpr::ind(StateAssn::truth(true))));
    }

    DistAssnPtr on_oplus(const DistAssnPtr& p) override {
        if (!p->guard || !free_vars(*p->guard).count(x_)) return QuantumRewriter::on_oplus(p);
        // The guard reads x, so it cannot survive as a split of the earlier
        // state; spell it out as box conjuncts on each side instead.
        using K = DistAssn::Kind;
        auto left = assn(p->p0);
        left = DistAssn::junction(K::And, left, on_box(DistAssn::box(p->guard)));
        auto right = assn(p->p1);
        right = DistAssn::junction(K::And, right, on_box(DistAssn::box(StateAssn::negate(p->guard))));
        return DistAssn::oplus(left, right);
    }

    DistAssnPtr on_quantifier(const DistAssnPtr& p) override {
        if (p->var != x_) return QuantumRewriter::on_quantifier(p);
        const auto renamed = fresh_var();
        const auto body = sub_p(p->p0, p->var, var_ref(renamed), {renamed});
        return DistAssn::quantifier(p->kind, renamed, p->lo, p->hi, assn(body));
    }

private:
    std::string x_;
    MeasurementPtr m_;
    std::vector<std::string> qs_;
};

class SimplifyRewriter : public QuantumRewriter {
public:
    SimplifyRewriter(const AssertionContext& ctx, double tol) : QuantumRewriter(ctx), tol_(tol) {}

protected:
    DistExprPtr on_expect(const DistExpr& r) override { return std::make_shared<DistExpr>(r); }

    DistExprPtr on_mexpect(const DistExpr& r) override {
        if (r.meas->name.empty() || r.meas->name.front() != '$') return std::make_shared<DistExpr>(r);
        auto it = done_.find(r.meas.get());
        if (it == done_.end()) {
            auto m = std::make_shared<NamedMeasurement>(
                NamedMeasurement{r.meas->name, simplify_measurement(r.meas->meas, tol_)});
            it = done_.emplace(r.meas.get(), m).first;
        }
        return DistExpr::mexpect(r.binders, it->second, r.qubits, r.body);
    }

    DistAssnPtr on_char(const DistAssnPtr& p) override { return p; }

private:
    double tol_;
    std::map<const NamedMeasurement*, MeasurementPtr> done_;
};

}  // namespace

DistAssnPtr subst_h(const DistAssnPtr& p, const std::string& q, const AssertionContext& ctx) {
    return InitRewriter(ctx, q).assn(p);
}
DistExprPtr subst_h(const DistExprPtr& r, const std::string& q, const AssertionContext& ctx) {
    return InitRewriter(ctx, q).expr(r);
}

DistAssnPtr subst_g(const DistAssnPtr& p, const UnitaryGate& u, const std::vector<std::string>& qs,
                    const AssertionContext& ctx) {
    return GateRewriter(ctx, u, qs).assn(p);
}
DistExprPtr subst_g(const DistExprPtr& r, const UnitaryGate& u, const std::vector<std::string>& qs,
                    const AssertionContext& ctx) {
    return GateRewriter(ctx, u, qs).expr(r);
}

DistAssnPtr subst_f(const DistAssnPtr& p, const std::string& x, const MeasurementPtr& m,
                    const std::vector<std::string>& qs, const AssertionContext& ctx) {
    return MeasureRewriter(ctx, x, m, qs).assn(p);
}
DistExprPtr subst_f(const DistExprPtr& r, const std::string& x, const MeasurementPtr& m,
                    const std::vector<std::string>& qs, const AssertionContext& ctx) {
    return MeasureRewriter(ctx, x, m, qs).expr(r);
}

// --- precondition calculus ---

DistAssnPtr pc(const Program& prog, const Com& c, const DistAssnPtr& post) {
    const auto ctx = AssertionContext::of(prog);
    switch (c.kind) {
        case Com::Kind::Skip:
        case Com::Kind::Nil: return post;
        case Com::Kind::Abort:
            if (post->kind == DistAssn::Kind::Box && post->guard->kind == StateAssn::Kind::False) {
                return DistAssn::truth(true);
            }
            throw PcError("abort has a precondition only for the postcondition box(false)", c.loc);
        case Com::Kind::Assign: return subst_assign(post, *c.expr, c.var);
        case Com::Kind::Seq: return pc(prog, *c.first, pc(prog, *c.second, post));
        case Com::Kind::If: {
            using K = DistAssn::Kind;
            const auto b = to_state_assn(*c.cond);
            const auto left = DistAssn::junction(K::And, pc(prog, *c.first, post), DistAssn::box(b));
            const auto right =
                DistAssn::junction(K::And, pc(prog, *c.second, post), DistAssn::box(StateAssn::negate(b)));
            return DistAssn::oplus(left, right, b);
        }
        case Com::Kind::While: throw PcError("precondition calculus needs a loop-free command; found a loop", c.loc);
        case Com::Kind::QInit: return subst_h(post, c.var, ctx);
        case Com::Kind::QUnit: {
            const auto* g = prog.find_gate(c.op);
            if (!g) throw PcError("unknown gate '" + c.op + "'", c.loc);
            return subst_g(post, *g, c.qubits, ctx);
        }
        case Com::Kind::QMeas: {
            const auto* m = prog.find_measurement(c.op);
            if (!m) throw PcError("unknown measurement '" + c.op + "'", c.loc);
            return subst_f(post, c.var, std::make_shared<NamedMeasurement>(NamedMeasurement{c.op, *m}), c.qubits, ctx);
        }
    }
    throw std::logic_error("bad command");
}

GeneralMeasurement simplify_measurement(const GeneralMeasurement& m, double tol) {
    std::vector<CMatrix> ops;
    std::vector<Label> labels;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (m.operators[i].max_abs() < tol) continue;
        ops.push_back(m.operators[i]);
        labels.push_back(m.labels[i]);
    }
    GeneralMeasurement out(m.arity, std::move(ops), std::move(labels));
    if (!check_measurement(out)) throw std::logic_error("simplified measurement is no longer complete");
    return out;
}

DistAssnPtr simplify_measurements(const DistAssnPtr& p, double tol) {
    // Placement is irrelevant here; the rewriter never lifts.
    const AssertionContext ctx;
    return SimplifyRewriter(ctx, tol).assn(p);
}

// --- triples ---

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Section {
    std::string text;
    int first_line = 0;
    bool seen = false;
};

DistAssnPtr parse_section(const Section& s, const char* name, const AssertionContext& ctx) {
    try {
        auto p = parse_assertion(s.text, ctx);
        check_kinds(*p);
        return p;
    } catch (const ParseError& e) {
        std::string msg = e.what();
        if (auto pos = msg.find(": "); pos != std::string::npos) msg = msg.substr(pos + 2);
        throw ParseError(std::string(name) + ": " + msg, {e.loc().line + s.first_line - 1, e.loc().column});
    } catch (const KindError& e) {
        throw ParseError(std::string(name) + ": " + e.what(), {s.first_line, 1});
    }
}

}  // namespace

Triple parse_triple(std::string_view text, const std::string& base_dir) {
    std::map<std::string, Section> sections{{"pre", {}}, {"prog", {}}, {"post", {}}};
    Section* current = nullptr;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto t = trim(line);
        bool header = false;
        for (auto& [key, sec] : sections) {
            if (t.rfind(key + ":", 0) == 0) {
                if (sec.seen) throw ParseError("section '" + key + "' appears twice", {lineno, 1});
                sec.seen = true;
                sec.first_line = lineno;
                sec.text = t.substr(key.size() + 1) + "\n";
                current = &sec;
                header = true;
                break;
            }
        }
        if (header) continue;
        if (!current) {
            if (!t.empty() && t.rfind("//", 0) != 0) throw ParseError("expected 'pre:', 'prog:' or 'post:'", {lineno, 1});
            continue;
        }
        current->text += line + "\n";
    }
    for (const auto& [key, sec] : sections)
        if (!sec.seen) throw ParseError("missing section '" + key + "'", {lineno, 1});

    Triple t;
    t.program_path = trim(sections["prog"].text);
    std::filesystem::path prog_path(t.program_path);
    if (prog_path.is_relative() && !base_dir.empty()) prog_path = std::filesystem::path(base_dir) / prog_path;
    t.program = parse_program(slurp(prog_path.string()));
    const auto ctx = AssertionContext::of(t.program);
    t.pre = parse_section(sections["pre"], "pre", ctx);
    t.post = parse_section(sections["post"], "post", ctx);
    return t;
}

Triple load_triple(const std::string& path) {
    const auto dir = std::filesystem::path(path).parent_path().string();
    return parse_triple(slurp(path), dir);
}

const char* to_string(CheckMode m) {
    switch (m) {
        case CheckMode::Semantic: return "semantic";
        case CheckMode::Pc: return "pc";
        case CheckMode::Both: return "both";
    }
    return "?";
}

std::size_t CheckReport::count(Truth t) const {
    return static_cast<std::size_t>(
        std::count_if(verdicts.begin(), verdicts.end(), [&](const WitnessVerdict& v) { return v.verdict == t; }));
}

Truth CheckReport::overall() const {
    if (count(Truth::False)) return Truth::False;
    if (count(Truth::Indeterminate)) return Truth::Indeterminate;
    return Truth::True;
}

namespace {

WitnessVerdict check_one(const Triple& t, const Witness& w, CheckMode mode, const DistAssnPtr& pcp,
                         const AssertionContext& ctx, const CheckOptions& opt) {
    WitnessVerdict v;
    v.id = w.id;
    if (w.povd.dim() != t.program.dim()) {
        throw DimensionError("witness '" + w.id + "' has dimension " + std::to_string(w.povd.dim()) +
                             ", the program needs " + std::to_string(t.program.dim()));
    }
    v.pre = holds(*t.pre, w.povd, ctx);
    if (v.pre == Truth::False) {
        v.verdict = Truth::True;
        v.details = "precondition false; holds vacuously";
        return v;
    }
    Truth verdict = Truth::True;
    std::vector<std::string> notes;
    if (v.pre == Truth::Indeterminate) notes.push_back("precondition indeterminate");
    if (mode != CheckMode::Pc) {
        const auto den = denote(t.program, w.povd, opt.denote);
        if (!den.converged) {
            v.semantic = Truth::Indeterminate;
            notes.push_back("loop iteration cap reached with residual mass " + std::to_string(den.residual_mass));
        } else {
            v.semantic = holds(*t.post, den.result, ctx);
            if (*v.semantic == Truth::False) notes.push_back("postcondition fails on the output");
            if (*v.semantic == Truth::Indeterminate) notes.push_back("postcondition indeterminate on the output");
        }
        if (*v.semantic != Truth::True) v.output = den.result;
        verdict = truth_and(verdict, truth_or(truth_not(v.pre), *v.semantic));
    }
    if (mode != CheckMode::Semantic) {
        v.pc = holds(*pcp, w.povd, ctx);
        if (*v.pc == Truth::False) notes.push_back("precondition calculus result fails at the witness");
        if (*v.pc == Truth::Indeterminate) notes.push_back("precondition calculus result indeterminate");
        verdict = truth_and(verdict, truth_or(truth_not(v.pre), *v.pc));
    }
    v.verdict = verdict;
    for (std::size_t i = 0; i < notes.size(); ++i) v.details += (i ? "; " : "") + notes[i];
    if (v.details.empty()) v.details = "holds";
    return v;
}

}  // namespace

CheckReport check_triple(const Triple& t, const std::vector<Witness>& witnesses, CheckMode mode,
                         const CheckOptions& opt) {
    CheckReport report;
    report.mode = mode;
    if (mode != CheckMode::Semantic) report.precondition = simplify_measurements(pc(t.program, t.post));
    const auto ctx = AssertionContext::of(t.program);
    report.verdicts.resize(witnesses.size());
    std::exception_ptr error;
    const auto n = static_cast<std::ptrdiff_t>(witnesses.size());
#pragma omp parallel for schedule(dynamic) if (opt.policy == ExecPolicy::Parallel)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            report.verdicts[i] = check_one(t, witnesses[i], mode, report.precondition, ctx, opt);
        } catch (...) {
#pragma omp critical(qimp_check_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
    return report;
}

std::string report_to_json(const CheckReport& r, const Triple& t, int indent) {
    using nlohmann::json;
    json doc;
    doc["mode"] = to_string(r.mode);
    doc["program"] = t.program_path;
    doc["witness_relative"] = true;
    doc["verdict"] = r.vacuous() ? "vacuous" : to_string(r.overall());
    doc["counts"] = {{"true", r.count(Truth::True)},
                     {"false", r.count(Truth::False)},
                     {"indeterminate", r.count(Truth::Indeterminate)}};
    const auto ctx = AssertionContext::of(t.program);
    if (r.precondition) doc["precondition"] = pretty(*r.precondition, ctx);
    doc["witnesses"] = json::array();
    for (const auto& v : r.verdicts) {
        json w = {{"id", v.id}, {"verdict", to_string(v.verdict)}, {"pre", to_string(v.pre)}, {"details", v.details}};
        if (v.semantic) w["semantic"] = to_string(*v.semantic);
        if (v.pc) w["pc"] = to_string(*v.pc);
        if (v.output) w["output"] = json::parse(povd_to_json(*v.output, t.program.qubits, -1));
        doc["witnesses"].push_back(std::move(w));
    }
    return doc.dump(indent);
}

}  // namespace qimp
