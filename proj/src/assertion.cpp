#include "qimp/assertion.hpp"

#include <algorithm>

#include "qimp/opsem.hpp"

namespace qimp {

// --- constructors ---

StateExprPtr StateExpr::lit(std::int64_t v) {
    auto e = std::make_shared<StateExpr>();
    e->kind = Kind::Lit;
    e->value = v;
    return e;
}

StateExprPtr StateExpr::var(std::string name) {
    auto e = std::make_shared<StateExpr>();
    e->kind = Kind::Var;
    e->name = std::move(name);
    return e;
}

StateExprPtr StateExpr::ind(StateAssnPtr psi) {
    auto e = std::make_shared<StateExpr>();
    e->kind = Kind::Ind;
    e->cond = std::move(psi);
    return e;
}

StateExprPtr StateExpr::binary(Kind k, StateExprPtr l, StateExprPtr r) {
    auto e = std::make_shared<StateExpr>();
    e->kind = k;
    e->lhs = std::move(l);
    e->rhs = std::move(r);
    return e;
}

StateAssnPtr StateAssn::truth(bool v) {
    auto a = std::make_shared<StateAssn>();
    a->kind = v ? Kind::True : Kind::False;
    return a;
}

StateAssnPtr StateAssn::cmp(CmpOp op, StateExprPtr l, StateExprPtr r) {
    auto a = std::make_shared<StateAssn>();
    a->kind = Kind::Cmp;
    a->op = op;
    a->lhs = std::move(l);
    a->rhs = std::move(r);
    return a;
}

StateAssnPtr StateAssn::negate(StateAssnPtr x) {
    auto a = std::make_shared<StateAssn>();
    a->kind = Kind::Not;
    a->a0 = std::move(x);
    return a;
}

StateAssnPtr StateAssn::junction(Kind k, StateAssnPtr l, StateAssnPtr r) {
    auto a = std::make_shared<StateAssn>();
    a->kind = k;
    a->a0 = std::move(l);
    a->a1 = std::move(r);
    return a;
}

StateAssnPtr StateAssn::quantifier(Kind k, std::string var, std::int64_t lo, std::int64_t hi, StateAssnPtr body) {
    auto a = std::make_shared<StateAssn>();
    a->kind = k;
    a->var = std::move(var);
    a->lo = lo;
    a->hi = hi;
    a->a0 = std::move(body);
    return a;
}

DistExprPtr DistExpr::expect(StateExprPtr e) {
    auto r = std::make_shared<DistExpr>();
    r->kind = Kind::Expect;
    r->body = std::move(e);
    return r;
}

DistExprPtr DistExpr::mexpect(std::vector<std::string> binders, MeasurementPtr m, std::vector<std::string> qubits,
                              StateExprPtr e) {
    if (!m) throw std::invalid_argument("measured expectation without a measurement");
    if (m->meas.size() > 0 && m->meas.label_width() != binders.size()) {
        throw std::invalid_argument("measurement '" + m->name + "' has labels of width " +
                                    std::to_string(m->meas.label_width()) + " but binds " +
                                    std::to_string(binders.size()) + " variables");
    }
    if (m->meas.arity != qubits.size()) {
        throw std::invalid_argument("measurement '" + m->name + "' acts on " + std::to_string(m->meas.arity) +
                                    " qubits, given " + std::to_string(qubits.size()));
    }
    auto r = std::make_shared<DistExpr>();
    r->kind = Kind::MExpect;
    r->binders = std::move(binders);
    r->meas = std::move(m);
    r->qubits = std::move(qubits);
    r->body = std::move(e);
    return r;
}

DistExprPtr DistExpr::constant(double v) {
    auto r = std::make_shared<DistExpr>();
    r->kind = Kind::Const;
    r->value = v;
    return r;
}

DistExprPtr DistExpr::binary(Kind k, DistExprPtr l, DistExprPtr rr) {
    auto r = std::make_shared<DistExpr>();
    r->kind = k;
    r->lhs = std::move(l);
    r->rhs = std::move(rr);
    return r;
}

DistExprPtr DistExpr::scale(double c, DistExprPtr x) {
    auto r = std::make_shared<DistExpr>();
    r->kind = Kind::Scale;
    r->value = c;
    r->lhs = std::move(x);
    return r;
}

DistExprPtr DistExpr::trace(DistExprPtr x) {
    auto r = std::make_shared<DistExpr>();
    r->kind = Kind::Trace;
    r->lhs = std::move(x);
    return r;
}

DistAssnPtr DistAssn::truth(bool v) {
    auto p = std::make_shared<DistAssn>();
    p->kind = v ? Kind::True : Kind::False;
    return p;
}

DistAssnPtr DistAssn::cmp(CmpOp op, DistExprPtr l, DistExprPtr r) {
    auto p = std::make_shared<DistAssn>();
    p->kind = Kind::Cmp;
    p->op = op;
    p->lhs = std::move(l);
    p->rhs = std::move(r);
    return p;
}

DistAssnPtr DistAssn::oplus(DistAssnPtr l, DistAssnPtr r, StateAssnPtr guard) {
    auto p = std::make_shared<DistAssn>();
    p->kind = Kind::OPlus;
    p->p0 = std::move(l);
    p->p1 = std::move(r);
    p->guard = std::move(guard);
    return p;
}

DistAssnPtr DistAssn::negate(DistAssnPtr x) {
    auto p = std::make_shared<DistAssn>();
    p->kind = Kind::Not;
    p->p0 = std::move(x);
    return p;
}

DistAssnPtr DistAssn::junction(Kind k, DistAssnPtr l, DistAssnPtr r) {
    auto p = std::make_shared<DistAssn>();
    p->kind = k;
    p->p0 = std::move(l);
    p->p1 = std::move(r);
    return p;
}

DistAssnPtr DistAssn::quantifier(Kind k, std::string var, std::int64_t lo, std::int64_t hi, DistAssnPtr body) {
    auto p = std::make_shared<DistAssn>();
    p->kind = k;
    p->var = std::move(var);
    p->lo = lo;
    p->hi = hi;
    p->p0 = std::move(body);
    return p;
}

DistAssnPtr DistAssn::box(StateAssnPtr psi) {
    auto p = std::make_shared<DistAssn>();
    p->kind = Kind::Box;
    p->guard = std::move(psi);
    return p;
}

DistAssnPtr DistAssn::char_eq(POVD mu) {
    auto p = std::make_shared<DistAssn>();
    p->kind = Kind::CharEq;
    p->target = std::make_shared<CharTarget>(CharTarget{std::move(mu)});
    return p;
}

// --- conversions from program expressions ---

StateExprPtr to_state_expr(const AExp& a) {
    switch (a.kind) {
        case AExp::Kind::Lit: return StateExpr::lit(a.value);
        case AExp::Kind::Var: return StateExpr::var(a.name);
        case AExp::Kind::Add: return StateExpr::binary(StateExpr::Kind::Add, to_state_expr(*a.lhs), to_state_expr(*a.rhs));
        case AExp::Kind::Sub: return StateExpr::binary(StateExpr::Kind::Sub, to_state_expr(*a.lhs), to_state_expr(*a.rhs));
        case AExp::Kind::Mul: return StateExpr::binary(StateExpr::Kind::Mul, to_state_expr(*a.lhs), to_state_expr(*a.rhs));
    }
    throw std::logic_error("bad arithmetic node");
}

StateAssnPtr to_state_assn(const BExp& b) {
    using K = StateAssn::Kind;
    switch (b.kind) {
        case BExp::Kind::True: return StateAssn::truth(true);
        case BExp::Kind::False: return StateAssn::truth(false);
        case BExp::Kind::Eq: return StateAssn::cmp(CmpOp::Eq, to_state_expr(*b.a0), to_state_expr(*b.a1));
        case BExp::Kind::Leq: return StateAssn::cmp(CmpOp::Leq, to_state_expr(*b.a0), to_state_expr(*b.a1));
        case BExp::Kind::Not: return StateAssn::negate(to_state_assn(*b.b0));
        case BExp::Kind::And: return StateAssn::junction(K::And, to_state_assn(*b.b0), to_state_assn(*b.b1));
        case BExp::Kind::Or: return StateAssn::junction(K::Or, to_state_assn(*b.b0), to_state_assn(*b.b1));
    }
    throw std::logic_error("bad boolean node");
}

// --- structural equality ---

namespace {
template <class T>
bool eq_ptr(const std::shared_ptr<const T>& a, const std::shared_ptr<const T>& b) {
    if (!a || !b) return !a && !b;
    return equal(*a, *b);
}

bool equal_meas(const NamedMeasurement& a, const NamedMeasurement& b) {
    return a.name == b.name && a.meas.arity == b.meas.arity && a.meas.labels == b.meas.labels &&
           a.meas.operators == b.meas.operators;
}
}  // namespace

bool equal(const StateExpr& a, const StateExpr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case StateExpr::Kind::Lit: return a.value == b.value;
        case StateExpr::Kind::Var: return a.name == b.name;
        case StateExpr::Kind::Ind: return eq_ptr(a.cond, b.cond);
        default: return eq_ptr(a.lhs, b.lhs) && eq_ptr(a.rhs, b.rhs);
    }
}

bool equal(const StateAssn& a, const StateAssn& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case StateAssn::Kind::True:
        case StateAssn::Kind::False: return true;
        case StateAssn::Kind::Cmp: return a.op == b.op && eq_ptr(a.lhs, b.lhs) && eq_ptr(a.rhs, b.rhs);
        case StateAssn::Kind::Forall:
        case StateAssn::Kind::Exists:
            return a.var == b.var && a.lo == b.lo && a.hi == b.hi && eq_ptr(a.a0, b.a0);
        default: return eq_ptr(a.a0, b.a0) && eq_ptr(a.a1, b.a1);
    }
}

bool equal(const DistExpr& a, const DistExpr& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case DistExpr::Kind::Expect: return eq_ptr(a.body, b.body);
        case DistExpr::Kind::MExpect:
            return a.binders == b.binders && a.qubits == b.qubits && equal_meas(*a.meas, *b.meas) &&
                   eq_ptr(a.body, b.body);
        case DistExpr::Kind::Const: return a.value == b.value;
        case DistExpr::Kind::Scale: return a.value == b.value && eq_ptr(a.lhs, b.lhs);
        case DistExpr::Kind::Trace: return eq_ptr(a.lhs, b.lhs);
        default: return eq_ptr(a.lhs, b.lhs) && eq_ptr(a.rhs, b.rhs);
    }
}

bool equal(const DistAssn& a, const DistAssn& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case DistAssn::Kind::True:
        case DistAssn::Kind::False: return true;
        case DistAssn::Kind::Cmp: return a.op == b.op && eq_ptr(a.lhs, b.lhs) && eq_ptr(a.rhs, b.rhs);
        case DistAssn::Kind::OPlus: return eq_ptr(a.p0, b.p0) && eq_ptr(a.p1, b.p1) && eq_ptr(a.guard, b.guard);
        case DistAssn::Kind::Forall:
        case DistAssn::Kind::Exists:
            return a.var == b.var && a.lo == b.lo && a.hi == b.hi && eq_ptr(a.p0, b.p0);
        case DistAssn::Kind::Box: return eq_ptr(a.guard, b.guard);
        case DistAssn::Kind::CharEq: return povd_eq(a.target->povd, b.target->povd, 0.0);
        default: return eq_ptr(a.p0, b.p0) && eq_ptr(a.p1, b.p1);
    }
}

// --- variables ---

namespace {
void collect_fv(const StateAssn& a, std::set<std::string>& out);

void collect_fv(const StateExpr& e, std::set<std::string>& out) {
    switch (e.kind) {
        case StateExpr::Kind::Lit: return;
        case StateExpr::Kind::Var: out.insert(e.name); return;
        case StateExpr::Kind::Ind: collect_fv(*e.cond, out); return;
        default:
            collect_fv(*e.lhs, out);
            collect_fv(*e.rhs, out);
    }
}

void collect_fv(const StateAssn& a, std::set<std::string>& out) {
    switch (a.kind) {
        case StateAssn::Kind::True:
        case StateAssn::Kind::False: return;
        case StateAssn::Kind::Cmp:
            collect_fv(*a.lhs, out);
            collect_fv(*a.rhs, out);
            return;
        case StateAssn::Kind::Forall:
        case StateAssn::Kind::Exists: {
            std::set<std::string> inner;
            collect_fv(*a.a0, inner);
            inner.erase(a.var);
            out.insert(inner.begin(), inner.end());
            return;
        }
        default:
            collect_fv(*a.a0, out);
            if (a.a1) collect_fv(*a.a1, out);
    }
}

void collect_fv(const DistExpr& r, std::set<std::string>& out) {
    switch (r.kind) {
        case DistExpr::Kind::Expect: collect_fv(*r.body, out); return;
        case DistExpr::Kind::MExpect: {
            std::set<std::string> inner;
            collect_fv(*r.body, inner);
            for (const auto& x : r.binders) inner.erase(x);
            out.insert(inner.begin(), inner.end());
            return;
        }
        case DistExpr::Kind::Const: return;
        default:
            collect_fv(*r.lhs, out);
            if (r.rhs) collect_fv(*r.rhs, out);
    }
}

void collect_fv(const DistAssn& p, std::set<std::string>& out) {
    switch (p.kind) {
        case DistAssn::Kind::True:
        case DistAssn::Kind::False:
        case DistAssn::Kind::CharEq: return;
        case DistAssn::Kind::Cmp:
            collect_fv(*p.lhs, out);
            collect_fv(*p.rhs, out);
            return;
        case DistAssn::Kind::Box: collect_fv(*p.guard, out); return;
        case DistAssn::Kind::Forall:
        case DistAssn::Kind::Exists: {
            std::set<std::string> inner;
            collect_fv(*p.p0, inner);
            inner.erase(p.var);
            out.insert(inner.begin(), inner.end());
            return;
        }
        default:
            collect_fv(*p.p0, out);
            if (p.p1) collect_fv(*p.p1, out);
            if (p.guard) collect_fv(*p.guard, out);
    }
}

void collect_bound(const StateAssn& a, std::set<std::string>& out);

void collect_bound(const StateExpr& e, std::set<std::string>& out) {
    if (e.kind == StateExpr::Kind::Ind) collect_bound(*e.cond, out);
    if (e.lhs) collect_bound(*e.lhs, out);
    if (e.rhs) collect_bound(*e.rhs, out);
}

void collect_bound(const StateAssn& a, std::set<std::string>& out) {
    if (a.kind == StateAssn::Kind::Forall || a.kind == StateAssn::Kind::Exists) out.insert(a.var);
    if (a.lhs) collect_bound(*a.lhs, out);
    if (a.rhs) collect_bound(*a.rhs, out);
    if (a.a0) collect_bound(*a.a0, out);
    if (a.a1) collect_bound(*a.a1, out);
}

void collect_bound(const DistExpr& r, std::set<std::string>& out) {
    if (r.kind == DistExpr::Kind::MExpect) out.insert(r.binders.begin(), r.binders.end());
    if (r.body) collect_bound(*r.body, out);
    if (r.lhs) collect_bound(*r.lhs, out);
    if (r.rhs) collect_bound(*r.rhs, out);
}

void collect_bound(const DistAssn& p, std::set<std::string>& out) {
    if (p.kind == DistAssn::Kind::Forall || p.kind == DistAssn::Kind::Exists) out.insert(p.var);
    if (p.lhs) collect_bound(*p.lhs, out);
    if (p.rhs) collect_bound(*p.rhs, out);
    if (p.p0) collect_bound(*p.p0, out);
    if (p.p1) collect_bound(*p.p1, out);
    if (p.guard) collect_bound(*p.guard, out);
}

void collect_meas(const DistExpr& r, std::vector<MeasurementPtr>& out) {
    if (r.kind == DistExpr::Kind::MExpect) {
        const bool seen = std::any_of(out.begin(), out.end(), [&](const MeasurementPtr& m) { return m == r.meas; });
        if (!seen) out.push_back(r.meas);
    }
    if (r.lhs) collect_meas(*r.lhs, out);
    if (r.rhs) collect_meas(*r.rhs, out);
}

void collect_meas(const DistAssn& p, std::vector<MeasurementPtr>& out) {
    if (p.lhs) collect_meas(*p.lhs, out);
    if (p.rhs) collect_meas(*p.rhs, out);
    if (p.p0) collect_meas(*p.p0, out);
    if (p.p1) collect_meas(*p.p1, out);
}
}  // namespace

std::set<std::string> free_vars(const StateExpr& e) {
    std::set<std::string> out;
    collect_fv(e, out);
    return out;
}

std::set<std::string> free_vars(const StateAssn& a) {
    std::set<std::string> out;
    collect_fv(a, out);
    return out;
}

std::set<std::string> free_vars(const DistAssn& p) {
    std::set<std::string> out;
    collect_fv(p, out);
    return out;
}

std::set<std::string> bound_vars(const DistAssn& p) {
    std::set<std::string> out;
    collect_bound(p, out);
    return out;
}

std::vector<MeasurementPtr> measurements_of(const DistAssn& p) {
    std::vector<MeasurementPtr> out;
    collect_meas(p, out);
    return out;
}

std::vector<std::size_t> AssertionContext::indices(const std::vector<std::string>& qs) const {
    std::vector<std::size_t> out;
    out.reserve(qs.size());
    for (const auto& q : qs) {
        auto it = std::find(qubits.begin(), qubits.end(), q);
        if (it == qubits.end()) throw std::out_of_range("unknown qubit '" + q + "' in assertion");
        out.push_back(static_cast<std::size_t>(it - qubits.begin()));
    }
    return out;
}

// --- three-valued logic ---

const char* to_string(Truth t) {
    switch (t) {
        case Truth::True: return "true";
        case Truth::False: return "false";
        case Truth::Indeterminate: return "indeterminate";
    }
    return "?";
}

Truth truth_and(Truth a, Truth b) {
    if (a == Truth::False || b == Truth::False) return Truth::False;
    if (a == Truth::True && b == Truth::True) return Truth::True;
    return Truth::Indeterminate;
}

Truth truth_or(Truth a, Truth b) {
    if (a == Truth::True || b == Truth::True) return Truth::True;
    if (a == Truth::False && b == Truth::False) return Truth::False;
    return Truth::Indeterminate;
}

Truth truth_not(Truth a) {
    if (a == Truth::Indeterminate) return a;
    return a == Truth::True ? Truth::False : Truth::True;
}

// --- state level ---

namespace {
constexpr std::int64_t kMaxQuantifierRange = std::int64_t{1} << 20;

void check_range(std::int64_t lo, std::int64_t hi) {
    if (hi >= lo && (hi - lo) >= kMaxQuantifierRange) throw std::invalid_argument("quantifier range too large");
}

std::int64_t checked(StateExpr::Kind k, std::int64_t l, std::int64_t r) {
    std::int64_t out = 0;
    bool overflow = false;
    switch (k) {
        case StateExpr::Kind::Add: overflow = __builtin_add_overflow(l, r, &out); break;
        case StateExpr::Kind::Sub: overflow = __builtin_sub_overflow(l, r, &out); break;
        case StateExpr::Kind::Mul: overflow = __builtin_mul_overflow(l, r, &out); break;
        default: throw std::logic_error("not a binary operator");
    }
    if (overflow) throw OverflowError("integer overflow in state expression");
    return out;
}
}  // namespace

std::int64_t eval_state_expr(const StateExpr& e, const ClassicalState& sigma) {
    switch (e.kind) {
        case StateExpr::Kind::Lit: return e.value;
        case StateExpr::Kind::Var: return sigma[e.name];
        case StateExpr::Kind::Ind: return eval_state_assn(*e.cond, sigma) ? 1 : 0;
        default: return checked(e.kind, eval_state_expr(*e.lhs, sigma), eval_state_expr(*e.rhs, sigma));
    }
}

bool eval_state_assn(const StateAssn& a, const ClassicalState& sigma) {
    switch (a.kind) {
        case StateAssn::Kind::True: return true;
        case StateAssn::Kind::False: return false;
        case StateAssn::Kind::Cmp: {
            const auto l = eval_state_expr(*a.lhs, sigma);
            const auto r = eval_state_expr(*a.rhs, sigma);
            switch (a.op) {
                case CmpOp::Eq: return l == r;
                case CmpOp::Lt: return l < r;
                case CmpOp::Leq: return l <= r;
            }
            return false;
        }
        case StateAssn::Kind::Not: return !eval_state_assn(*a.a0, sigma);
        case StateAssn::Kind::And: return eval_state_assn(*a.a0, sigma) && eval_state_assn(*a.a1, sigma);
        case StateAssn::Kind::Or: return eval_state_assn(*a.a0, sigma) || eval_state_assn(*a.a1, sigma);
        case StateAssn::Kind::Implies: return !eval_state_assn(*a.a0, sigma) || eval_state_assn(*a.a1, sigma);
        case StateAssn::Kind::Forall:
        case StateAssn::Kind::Exists: {
            check_range(a.lo, a.hi);
            const bool all = a.kind == StateAssn::Kind::Forall;
            for (std::int64_t n = a.lo; n <= a.hi; ++n) {
                if (eval_state_assn(*a.a0, sigma.updated(a.var, n)) != all) return !all;
            }
            return all;
        }
    }
    return false;
}

POVD restrict(const POVD& mu, const StateAssn& psi) {
    POVD out(mu.dim());
    for (const auto& [sigma, rho] : mu.entries())
        if (eval_state_assn(psi, sigma)) out.accumulate(sigma, rho);
    return out;
}

// --- distribution level ---

namespace {

/// Quantifier bindings of the enclosing distribution assertion, applied on
/// top of every classical state in the support.
using Env = std::vector<std::pair<std::string, std::int64_t>>;

ClassicalState with_env(const ClassicalState& sigma, const Env& env) {
    if (env.empty()) return sigma;
    ClassicalState out = sigma;
    for (const auto& [x, n] : env) out = out.updated(x, n);
    return out;
}

bool is_identity_placement(const std::vector<std::size_t>& idx, std::size_t n) {
    if (idx.size() != n) return false;
    for (std::size_t i = 0; i < n; ++i)
        if (idx[i] != i) return false;
    return true;
}

DistValue eval_r(const DistExpr& r, const POVD& mu, const AssertionContext& ctx, const Env& env) {
    DistValue out;
    switch (r.kind) {
        case DistExpr::Kind::Expect: {
            out.op = CMatrix::zero(mu.dim());
            for (const auto& [sigma, rho] : mu.entries()) {
                const auto w = eval_state_expr(*r.body, with_env(sigma, env));
                if (w != 0) out.op += Complex(static_cast<double>(w), 0.0) * rho;
            }
            return out;
        }
        case DistExpr::Kind::MExpect: {
            const auto& m = r.meas->meas;
            const auto idx = ctx.indices(r.qubits);
            const auto n = ctx.qubits.size();
            const GeneralMeasurement full = is_identity_placement(idx, n) ? m : embed(m, idx, n);
            if (full.size() > 0 && full.operators.front().rows() != mu.dim()) {
                throw DimensionError("measurement '" + r.meas->name + "' does not match the state dimension");
            }
            out.op = CMatrix::zero(mu.dim());
            for (const auto& [sigma, rho] : mu.entries()) {
                const auto base = with_env(sigma, env);
                for (std::size_t i = 0; i < full.size(); ++i) {
                    const auto w = eval_state_expr(*r.body, base.updated(r.binders, full.labels[i]));
                    if (w != 0) out.op += Complex(static_cast<double>(w), 0.0) * conjugate_by(full.operators[i], rho);
                }
            }
            return out;
        }
        case DistExpr::Kind::Const:
            out.is_operator = false;
            out.scalar = r.value;
            return out;
        case DistExpr::Kind::Scale: {
            out = eval_r(*r.lhs, mu, ctx, env);
            if (out.is_operator) out.op = Complex(r.value, 0.0) * out.op;
            else out.scalar *= r.value;
            return out;
        }
        case DistExpr::Kind::Trace: {
            auto v = eval_r(*r.lhs, mu, ctx, env);
            if (!v.is_operator) throw KindError("trace of a scalar");
            out.is_operator = false;
            out.scalar = v.op.trace().real();
            return out;
        }
        case DistExpr::Kind::Add:
        case DistExpr::Kind::Sub: {
            auto l = eval_r(*r.lhs, mu, ctx, env);
            auto rv = eval_r(*r.rhs, mu, ctx, env);
            if (l.is_operator != rv.is_operator) throw KindError("sum of an operator and a scalar");
            const bool add = r.kind == DistExpr::Kind::Add;
            if (l.is_operator) l.op = add ? l.op + rv.op : l.op - rv.op;
            else l.scalar = add ? l.scalar + rv.scalar : l.scalar - rv.scalar;
            return l;
        }
    }
    throw std::logic_error("bad distribution expression");
}

bool compare(CmpOp op, const DistValue& l, const DistValue& r) {
    if (l.is_operator != r.is_operator) throw KindError("comparison between an operator and a scalar");
    if (l.is_operator) {
        const bool eq = approx_equal(l.op, r.op, kEpsNum);
        switch (op) {
            case CmpOp::Eq: return eq;
            case CmpOp::Leq: return loewner_leq(l.op, r.op, kEpsNum);
            case CmpOp::Lt: return !eq && loewner_leq(l.op, r.op, kEpsNum);
        }
    }
    switch (op) {
        case CmpOp::Eq: return std::abs(l.scalar - r.scalar) <= kEpsNum;
        case CmpOp::Leq: return l.scalar <= r.scalar + kEpsNum;
        case CmpOp::Lt: return l.scalar < r.scalar - kEpsNum;
    }
    return false;
}

/// Conjunction of the Box conjuncts found at the top of p's And chain.
StateAssnPtr box_conjuncts(const DistAssn& p) {
    if (p.kind == DistAssn::Kind::Box) return p.guard;
    if (p.kind != DistAssn::Kind::And) return nullptr;
    auto l = box_conjuncts(*p.p0);
    auto r = box_conjuncts(*p.p1);
    if (l && r) return StateAssn::junction(StateAssn::Kind::And, l, r);
    return l ? l : r;
}

class Evaluator {
public:
    explicit Evaluator(const AssertionContext& ctx) : ctx_(ctx) {}

    Truth holds(const DistAssn& p, const POVD& mu, Env& env) const {
        switch (p.kind) {
            case DistAssn::Kind::True: return Truth::True;
            case DistAssn::Kind::False: return Truth::False;
            case DistAssn::Kind::Cmp:
                return truth_of(compare(p.op, eval_r(*p.lhs, mu, ctx_, env), eval_r(*p.rhs, mu, ctx_, env)));
            case DistAssn::Kind::Not: return truth_not(holds(*p.p0, mu, env));
            case DistAssn::Kind::And: {
                const auto l = holds(*p.p0, mu, env);
                if (l == Truth::False) return l;
                return truth_and(l, holds(*p.p1, mu, env));
            }
            case DistAssn::Kind::Or: {
                const auto l = holds(*p.p0, mu, env);
                if (l == Truth::True) return l;
                return truth_or(l, holds(*p.p1, mu, env));
            }
            case DistAssn::Kind::Implies: {
                const auto l = holds(*p.p0, mu, env);
                if (l == Truth::False) return Truth::True;
                return truth_or(truth_not(l), holds(*p.p1, mu, env));
            }
            case DistAssn::Kind::Forall:
            case DistAssn::Kind::Exists: {
                check_range(p.lo, p.hi);
                const bool all = p.kind == DistAssn::Kind::Forall;
                Truth acc = all ? Truth::True : Truth::False;
                for (std::int64_t n = p.lo; n <= p.hi; ++n) {
                    env.emplace_back(p.var, n);
                    const auto t = holds(*p.p0, mu, env);
                    env.pop_back();
                    acc = all ? truth_and(acc, t) : truth_or(acc, t);
                    if (acc == (all ? Truth::False : Truth::True)) break;
                }
                return acc;
            }
            case DistAssn::Kind::Box: return truth_of(support_satisfies(mu, *p.guard, env));
            case DistAssn::Kind::CharEq: return truth_of(povd_eq(mu, p.target->povd));
            case DistAssn::Kind::OPlus: return oplus(p, mu, env);
        }
        return Truth::Indeterminate;
    }

private:
    static bool support_satisfies(const POVD& mu, const StateAssn& psi, const Env& env) {
        for (const auto& [sigma, rho] : mu.entries())
            if (!eval_state_assn(psi, with_env(sigma, env))) return false;
        return true;
    }

    static POVD split(const POVD& mu, const StateAssn& psi, const Env& env, bool keep) {
        POVD out(mu.dim());
        for (const auto& [sigma, rho] : mu.entries())
            if (eval_state_assn(psi, with_env(sigma, env)) == keep) out.accumulate(sigma, rho);
        return out;
    }

    Truth both(const DistAssn& p, const POVD& mu0, const POVD& mu1, Env& env) const {
        const auto l = holds(*p.p0, mu0, env);
        if (l == Truth::False) return l;
        return truth_and(l, holds(*p.p1, mu1, env));
    }

    bool try_split(const DistAssn& p, const POVD& mu0, const POVD& mu1, Env& env) const {
        return both(p, mu0, mu1, env) == Truth::True;
    }

    Truth oplus(const DistAssn& p, const POVD& mu, Env& env) const {
        const POVD none(mu.dim());
        if (p.guard) return both(p, split(mu, *p.guard, env, true), split(mu, *p.guard, env, false), env);
        if (mu.empty()) return both(p, none, none, env);

        const auto b0 = box_conjuncts(*p.p0);
        const auto b1 = box_conjuncts(*p.p1);
        if (b0 && b1) {
            POVD only0(mu.dim()), only1(mu.dim()), overlap(mu.dim());
            for (const auto& [sigma, rho] : mu.entries()) {
                const auto s = with_env(sigma, env);
                const bool in0 = eval_state_assn(*b0, s);
                const bool in1 = eval_state_assn(*b1, s);
                if (!in0 && !in1) return Truth::False;
                (in0 && in1 ? overlap : in0 ? only0 : only1).accumulate(sigma, rho);
            }
            if (overlap.empty()) return both(p, only0, only1, env);
            POVD to0 = only0;
            to0 += overlap;
            POVD to1 = only1;
            to1 += overlap;
            if (try_split(p, to0, only1, env) || try_split(p, only0, to1, env)) return Truth::True;
            return Truth::Indeterminate;
        }
        if (b0 || b1) {
            const auto& psi = b0 ? *b0 : *b1;
            const POVD in = split(mu, psi, env, true);
            const POVD out = split(mu, psi, env, false);
            if (b0 ? try_split(p, in, out, env) : try_split(p, out, in, env)) return Truth::True;
        }
        if (try_split(p, mu, none, env) || try_split(p, none, mu, env)) return Truth::True;
        return Truth::Indeterminate;
    }

    const AssertionContext& ctx_;
};

}  // namespace

bool is_operator_valued(const DistExpr& r) {
    switch (r.kind) {
        case DistExpr::Kind::Expect:
        case DistExpr::Kind::MExpect: return true;
        case DistExpr::Kind::Const: return false;
        case DistExpr::Kind::Trace:
            if (!is_operator_valued(*r.lhs)) throw KindError("trace of a scalar");
            return false;
        case DistExpr::Kind::Scale: return is_operator_valued(*r.lhs);
        case DistExpr::Kind::Add:
        case DistExpr::Kind::Sub: {
            const bool l = is_operator_valued(*r.lhs);
            if (l != is_operator_valued(*r.rhs)) throw KindError("sum of an operator and a scalar");
            return l;
        }
    }
    return true;
}

void check_kinds(const DistAssn& p) {
    if (p.kind == DistAssn::Kind::Cmp && is_operator_valued(*p.lhs) != is_operator_valued(*p.rhs)) {
        throw KindError("comparison between an operator and a scalar");
    }
    if (p.p0) check_kinds(*p.p0);
    if (p.p1) check_kinds(*p.p1);
}

DistValue eval_dist_expr(const DistExpr& r, const POVD& mu, const AssertionContext& ctx) {
    return eval_r(r, mu, ctx, {});
}

Truth holds(const DistAssn& p, const POVD& mu, const AssertionContext& ctx) {
    Env env;
    return Evaluator(ctx).holds(p, mu, env);
}

BoxEquivalence box_equiv_check(const StateAssnPtr& psi, const POVD& mu, const AssertionContext& ctx) {
    BoxEquivalence out;
    out.support_check = holds(*DistAssn::box(psi), mu, ctx) == Truth::True;

    const auto e_psi = DistExpr::expect(StateExpr::ind(psi));
    const auto e_true = DistExpr::expect(StateExpr::ind(StateAssn::truth(true)));
    out.expectation_form = holds(*DistAssn::cmp(CmpOp::Eq, e_psi, e_true), mu, ctx) == Truth::True;

    const auto fv = free_vars(*psi);
    std::string binder = "$b";
    while (fv.count(binder)) binder += "_";
    MeasurementPtr m;
    std::vector<std::string> qs;
    if (ctx.qubits.empty()) {
        m = std::make_shared<NamedMeasurement>(
            NamedMeasurement{"$id", GeneralMeasurement::with_index_labels(0, {CMatrix::identity(1)})});
    } else {
        m = std::make_shared<NamedMeasurement>(NamedMeasurement{"M", gates::computational()});
        qs = {ctx.qubits.front()};
    }
    const auto m_psi = DistExpr::mexpect({binder}, m, qs, StateExpr::ind(psi));
    const auto m_true = DistExpr::mexpect({binder}, m, qs, StateExpr::ind(StateAssn::truth(true)));
    out.measured_form = holds(*DistAssn::cmp(CmpOp::Eq, m_psi, m_true), mu, ctx) == Truth::True;
    return out;
}

}  // namespace qimp
