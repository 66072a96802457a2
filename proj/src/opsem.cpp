#include "qimp/opsem.hpp"

#include <exception>
#include <json.hpp>

namespace qimp {

namespace {

std::int64_t apply(AExp::Kind k, std::int64_t l, std::int64_t r) {
    std::int64_t out = 0;
    bool overflow = false;
    switch (k) {
        case AExp::Kind::Add: overflow = __builtin_add_overflow(l, r, &out); break;
        case AExp::Kind::Sub: overflow = __builtin_sub_overflow(l, r, &out); break;
        case AExp::Kind::Mul: overflow = __builtin_mul_overflow(l, r, &out); break;
        default: throw std::logic_error("not a binary arithmetic operator");
    }
    if (overflow) {
        throw OverflowError("integer overflow in " + std::to_string(l) +
                            (k == AExp::Kind::Add ? " + " : k == AExp::Kind::Sub ? " - " : " * ") + std::to_string(r));
    }
    return out;
}

}  // namespace

std::int64_t eval_aexp(const AExp& a, const ClassicalState& sigma) {
    switch (a.kind) {
        case AExp::Kind::Lit: return a.value;
        case AExp::Kind::Var: return sigma[a.name];
        default: return apply(a.kind, eval_aexp(*a.lhs, sigma), eval_aexp(*a.rhs, sigma));
    }
}

bool eval_bexp(const BExp& b, const ClassicalState& sigma) {
    switch (b.kind) {
        case BExp::Kind::True: return true;
        case BExp::Kind::False: return false;
        case BExp::Kind::Eq: return eval_aexp(*b.a0, sigma) == eval_aexp(*b.a1, sigma);
        case BExp::Kind::Leq: return eval_aexp(*b.a0, sigma) <= eval_aexp(*b.a1, sigma);
        case BExp::Kind::Not: return !eval_bexp(*b.b0, sigma);
        case BExp::Kind::And: {
            const bool l = eval_bexp(*b.b0, sigma);
            const bool r = eval_bexp(*b.b1, sigma);
            return l && r;
        }
        case BExp::Kind::Or: {
            const bool l = eval_bexp(*b.b0, sigma);
            const bool r = eval_bexp(*b.b1, sigma);
            return l || r;
        }
    }
    throw std::logic_error("unknown boolean expression");
}

// Left operand first, then right, then the primitive operation.
std::optional<AExpPtr> reduce_once(const AExpPtr& a, const ClassicalState& sigma) {
    switch (a->kind) {
        case AExp::Kind::Lit: return std::nullopt;
        case AExp::Kind::Var: return AExp::lit(sigma[a->name]);
        default: break;
    }
    if (auto l = reduce_once(a->lhs, sigma)) return AExp::binary(a->kind, *l, a->rhs);
    if (auto r = reduce_once(a->rhs, sigma)) return AExp::binary(a->kind, a->lhs, *r);
    return AExp::lit(apply(a->kind, a->lhs->value, a->rhs->value));
}

std::optional<BExpPtr> reduce_once(const BExpPtr& b, const ClassicalState& sigma) {
    switch (b->kind) {
        case BExp::Kind::True:
        case BExp::Kind::False: return std::nullopt;
        case BExp::Kind::Eq:
        case BExp::Kind::Leq: {
            if (auto l = reduce_once(b->a0, sigma)) return BExp::cmp(b->kind, *l, b->a1);
            if (auto r = reduce_once(b->a1, sigma)) return BExp::cmp(b->kind, b->a0, *r);
            const auto n = b->a0->value;
            const auto m = b->a1->value;
            return BExp::truth(b->kind == BExp::Kind::Eq ? n == m : n <= m);
        }
        case BExp::Kind::Not:
            if (auto inner = reduce_once(b->b0, sigma)) return BExp::negate(*inner);
            return BExp::truth(b->b0->kind == BExp::Kind::False);
        case BExp::Kind::And:
        case BExp::Kind::Or: {
            if (auto l = reduce_once(b->b0, sigma)) return BExp::junction(b->kind, *l, b->b1);
            if (auto r = reduce_once(b->b1, sigma)) return BExp::junction(b->kind, b->b0, *r);
            const bool l = b->b0->kind == BExp::Kind::True;
            const bool r = b->b1->kind == BExp::Kind::True;
            return BExp::truth(b->kind == BExp::Kind::And ? (l && r) : (l || r));
        }
    }
    throw std::logic_error("unknown boolean expression");
}

std::vector<std::string> reduction_chain(const AExpPtr& a, const ClassicalState& sigma) {
    std::vector<std::string> out{pretty(*a)};
    for (AExpPtr cur = a; auto next = reduce_once(cur, sigma);) {
        cur = *next;
        out.push_back(pretty(*cur));
    }
    return out;
}

std::vector<std::string> reduction_chain(const BExpPtr& b, const ClassicalState& sigma) {
    std::vector<std::string> out{pretty(*b)};
    for (BExpPtr cur = b; auto next = reduce_once(cur, sigma);) {
        cur = *next;
        out.push_back(pretty(*cur));
    }
    return out;
}

std::vector<CMatrix> lifted_operators(const Program& prog, const Com& c) {
    const std::size_t n = prog.qubit_count();
    const auto targets = c.kind == Com::Kind::QInit ? std::vector<std::size_t>{prog.qubit_index(c.var)}
                                                    : prog.qubit_indices(c.qubits);
    switch (c.kind) {
        case Com::Kind::QInit: {
            const CMatrix keep = CMatrix::basis_op(2, 0, 0);
            const CMatrix reset = CMatrix::basis_op(2, 0, 1);
            return {embed(keep, targets, n), embed(reset, targets, n)};
        }
        case Com::Kind::QUnit: {
            const UnitaryGate* g = prog.find_gate(c.op);
            if (!g) throw std::invalid_argument("unknown gate '" + c.op + "'");
            return {embed(g->mat, targets, n)};
        }
        case Com::Kind::QMeas: {
            const GeneralMeasurement* m = prog.find_measurement(c.op);
            if (!m) throw std::invalid_argument("unknown measurement '" + c.op + "'");
            return embed(*m, targets, n).operators;
        }
        default: throw std::logic_error("not a quantum command");
    }
}

OperatorCache::OperatorCache(const Program& prog, const Com& root) {
    std::vector<const Com*> todo{&root};
    while (!todo.empty()) {
        const Com* c = todo.back();
        todo.pop_back();
        switch (c->kind) {
            case Com::Kind::QInit:
            case Com::Kind::QUnit:
            case Com::Kind::QMeas: ops_.emplace(c, lifted_operators(prog, *c)); break;
            default:
                if (c->first) todo.push_back(c->first.get());
                if (c->second) todo.push_back(c->second.get());
        }
    }
}

const std::vector<CMatrix>* OperatorCache::find(const Com& c) const {
    auto it = ops_.find(&c);
    return it == ops_.end() ? nullptr : &it->second;
}

const std::vector<CMatrix>& OperatorCache::operators(const Program& prog, const Com& c) const {
    auto it = ops_.find(&c);
    if (it == ops_.end()) throw std::logic_error("command not in operator cache: " + pretty(c) + " (" + std::to_string(prog.qubit_count()) + " qubits)");
    return it->second;
}

StepResult step(const Configuration& cfg, const Program& prog, const OperatorCache* cache) {
    const Com& c = *cfg.command;
    auto ops = [&]() -> std::vector<CMatrix> {
        return cache ? cache->operators(prog, c) : lifted_operators(prog, c);
    };
    StepResult out;
    switch (c.kind) {
        case Com::Kind::Nil: throw std::logic_error("nil has no transition");
        case Com::Kind::Abort: return out;
        case Com::Kind::Skip: out.successors.push_back({Com::nil(), cfg.sigma, cfg.rho}); return out;
        case Com::Kind::Assign:
            out.successors.push_back({Com::nil(), cfg.sigma.updated(c.var, eval_aexp(*c.expr, cfg.sigma)), cfg.rho});
            return out;
        case Com::Kind::Seq: {
            if (c.first->kind == Com::Kind::Nil) return step({c.second, cfg.sigma, cfg.rho}, prog, cache);
            StepResult head = step({c.first, cfg.sigma, cfg.rho}, prog, cache);
            for (auto& s : head.successors) s.command = Com::seq(s.command, c.second);
            return head;
        }
        case Com::Kind::If:
            out.successors.push_back({eval_bexp(*c.cond, cfg.sigma) ? c.first : c.second, cfg.sigma, cfg.rho});
            return out;
        case Com::Kind::While:
            out.successors.push_back(
                {Com::if_(c.cond, Com::seq(c.first, cfg.command), Com::skip(c.loc), c.loc), cfg.sigma, cfg.rho});
            return out;
        case Com::Kind::QInit: {
            const auto k = ops();
            out.successors.push_back({Com::nil(), cfg.sigma, conjugate_by(k[0], cfg.rho) + conjugate_by(k[1], cfg.rho)});
            return out;
        }
        case Com::Kind::QUnit: out.successors.push_back({Com::nil(), cfg.sigma, conjugate_by(ops()[0], cfg.rho)}); return out;
        case Com::Kind::QMeas: {
            const auto k = ops();
            const GeneralMeasurement& m = *prog.find_measurement(c.op);
            for (std::size_t i = 0; i < k.size(); ++i)
                out.successors.push_back({Com::nil(), cfg.sigma.updated(c.var, m.labels[i].at(0)), conjugate_by(k[i], cfg.rho)});
            return out;
        }
    }
    throw std::logic_error("unknown command");
}

namespace {

std::vector<std::string> head_expr_steps(const Com& c, const ClassicalState& sigma) {
    switch (c.kind) {
        case Com::Kind::Assign: return reduction_chain(c.expr, sigma);
        case Com::Kind::If: return reduction_chain(c.cond, sigma);
        case Com::Kind::Seq: return head_expr_steps(c.first->kind == Com::Kind::Nil ? *c.second : *c.first, sigma);
        default: return {};
    }
}

struct Live {
    Configuration cfg;
    TraceNode* node = nullptr;
};

}  // namespace

RunResult run(const Program& prog, const POVD& init, const RunOptions& opt) { return run(prog, prog.body, init, opt); }

RunResult run(const Program& prog, const ComPtr& body, const POVD& init, const RunOptions& opt) {
    if (opt.fuel <= 0) throw std::invalid_argument("fuel must be positive");
    if (init.dim() != prog.dim()) throw DimensionError("initial POVD dimension does not match the program's qubits");
    const OperatorCache cache(prog, *body);

    RunResult res;
    res.terminal = POVD(prog.dim());
    std::vector<Live> frontier;
    res.trace.reserve(init.support_size());
    for (const auto& [sigma, rho] : init.entries()) {
        TraceNode* node = nullptr;
        if (opt.record_trace) {
            res.trace.push_back({pretty(*body), sigma, rho, {}, {}});
            node = &res.trace.back();
        }
        frontier.push_back({{body, sigma, rho}, node});
    }

    while (!frontier.empty() && res.layers < opt.fuel) {
        ++res.layers;
        res.max_frontier = std::max(res.max_frontier, frontier.size());
        const auto n = static_cast<std::ptrdiff_t>(frontier.size());
        std::vector<StepResult> stepped(frontier.size());
        std::vector<std::exception_ptr> errors(frontier.size());
        const bool parallel = opt.policy == ExecPolicy::Parallel && n > 1;
#pragma omp parallel for schedule(dynamic, 4) if (parallel)
        for (std::ptrdiff_t i = 0; i < n; ++i) {
            try {
                stepped[i] = step(frontier[i].cfg, prog, &cache);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
        for (const auto& e : errors)
            if (e) std::rethrow_exception(e);

        std::vector<Live> next;
        for (std::size_t i = 0; i < frontier.size(); ++i) {
            TraceNode* parent = frontier[i].node;
            if (parent) {
                parent->expr_steps = head_expr_steps(*frontier[i].cfg.command, frontier[i].cfg.sigma);
                parent->children.reserve(stepped[i].successors.size());
            }
            for (auto& s : stepped[i].successors) {
                if (s.rho.trace().real() < kEpsPrune) continue;
                TraceNode* child = nullptr;
                if (parent) {
                    parent->children.push_back({pretty(*s.command), s.sigma, s.rho, {}, {}});
                    child = &parent->children.back();
                }
                if (s.command->kind == Com::Kind::Nil) {
                    res.terminal.accumulate(s.sigma, s.rho);
                } else {
                    next.push_back({std::move(s), child});
                }
            }
        }
        frontier = std::move(next);
    }
    for (const auto& l : frontier) res.residual_mass += l.cfg.rho.trace().real();
    return res;
}

namespace {

nlohmann::json node_json(const TraceNode& n) {
    nlohmann::json cs = nlohmann::json::object();
    for (const auto& [k, v] : n.sigma.assignments()) cs[k] = v;
    nlohmann::json kids = nlohmann::json::array();
    for (const auto& c : n.children) kids.push_back(node_json(c));
    return {{"command", n.command}, {"cstate", cs}, {"rho", format_matrix(n.rho)},
            {"expr_steps", n.expr_steps}, {"children", kids}};
}

}  // namespace

std::string trace_to_json(const std::vector<TraceNode>& roots, int indent) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : roots) arr.push_back(node_json(r));
    return arr.dump(indent);
}

}  // namespace qimp
