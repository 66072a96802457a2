#include "qimp/densem.hpp"

#include <deque>
#include <exception>

#include "qimp/opsem.hpp"

namespace qimp {

namespace {

class Denoter {
public:
    Denoter(const Program& prog, const Com& root, const LoopOptions& loop)
        : prog_(prog), cache_(prog, root), loop_(loop) {}

    POVD eval(const Com& c, const POVD& mu) {
        if (mu.empty()) return mu;
        switch (c.kind) {
            case Com::Kind::Skip:
            case Com::Kind::Nil: return mu;
            case Com::Kind::Abort: return POVD(mu.dim());
            case Com::Kind::Assign: {
                POVD out(mu.dim());
                for (const auto& [sigma, rho] : mu.entries()) out.accumulate(sigma.updated(c.var, eval_aexp(*c.expr, sigma)), rho);
                return out;
            }
            case Com::Kind::Seq: return eval(*c.second, eval(*c.first, mu));
            case Com::Kind::If: {
                POVD out = eval(*c.first, restrict(mu, *c.cond));
                out += eval(*c.second, restrict(mu, *BExp::negate(c.cond)));
                return out;
            }
            case Com::Kind::While: {
                auto w = loop(*c.cond, *c.first, mu);
                return std::move(w.result);
            }
            case Com::Kind::QInit: {
                const auto& k = ops(c);
                POVD out(mu.dim());
                for (const auto& [sigma, rho] : mu.entries())
                    out.accumulate(sigma, conjugate_by(k[0], rho) + conjugate_by(k[1], rho));
                return out;
            }
            case Com::Kind::QUnit: {
                const auto& u = ops(c)[0];
                POVD out(mu.dim());
                for (const auto& [sigma, rho] : mu.entries()) out.accumulate(sigma, conjugate_by(u, rho));
                return out;
            }
            case Com::Kind::QMeas: {
                const auto& k = ops(c);
                const GeneralMeasurement& m = *prog_.find_measurement(c.op);
                POVD out(mu.dim());
                for (const auto& [sigma, rho] : mu.entries())
                    for (std::size_t i = 0; i < k.size(); ++i)
                        out.accumulate(sigma.updated(c.var, m.labels[i].at(0)), conjugate_by(k[i], rho));
                return out;
            }
        }
        throw std::logic_error("unknown command");
    }

    WhileResult loop(const BExp& b, const Com& body, const POVD& mu) {
        const auto not_b = BExp::negate(std::make_shared<const BExp>(b));
        WhileResult w;
        w.result = POVD(mu.dim());
        POVD live = mu;
        std::deque<POVD> recent;
        for (w.iterations = 1;; ++w.iterations) {
            w.result += restrict(live, *not_b);
            POVD cont = restrict(live, b);
            if (total_mass(cont) < loop_.tol) break;
            if (w.iterations >= loop_.cap) {
                w.converged = false;
                w.residual_mass = total_mass(cont);
                break;
            }
            live = eval(body, cont);
            // A repeated live POVD means its mass circulates forever without leaving.
            bool repeated = false;
            for (const auto& old : recent) repeated = repeated || povd_eq(old, live, loop_.tol);
            if (repeated) {
                ++w.iterations;
                break;
            }
            recent.push_back(live);
            if (recent.size() > 8) recent.pop_front();
        }
        stats_.converged = stats_.converged && w.converged;
        stats_.iterations = std::max(stats_.iterations, w.iterations);
        stats_.residual_mass += w.residual_mass;
        return w;
    }

    Denotation& stats() { return stats_; }

private:
    const std::vector<CMatrix>& ops(const Com& c) {
        if (const auto* hit = cache_.find(c)) return *hit;
        return extra_.emplace(&c, lifted_operators(prog_, c)).first->second;
    }

    const Program& prog_;
    OperatorCache cache_;
    std::unordered_map<const Com*, std::vector<CMatrix>> extra_;
    LoopOptions loop_;
    Denotation stats_;
};

void check_dims(const Program& prog, const POVD& mu) {
    if (mu.dim() != prog.dim()) throw DimensionError("POVD dimension does not match the program's qubits");
}

}  // namespace

Denotation denote(const Program& prog, const Com& c, const POVD& mu, const DenoteOptions& opt) {
    check_dims(prog, mu);
    std::vector<std::pair<ClassicalState, CMatrix>> items(mu.entries().begin(), mu.entries().end());
    const auto n = static_cast<std::ptrdiff_t>(items.size());
    std::vector<Denotation> parts(items.size());
    std::vector<std::exception_ptr> errors(items.size());
    const bool parallel = opt.policy == ExecPolicy::Parallel && n > 1;
#pragma omp parallel for schedule(dynamic) if (parallel)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            Denoter d(prog, c, opt.loop);
            POVD r = d.eval(c, POVD(items[i].first, items[i].second));
            parts[i] = std::move(d.stats());
            parts[i].result = std::move(r);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    Denotation out;
    out.result = POVD(mu.dim());
    for (auto& p : parts) {
        out.result += p.result;
        out.converged = out.converged && p.converged;
        out.iterations = std::max(out.iterations, p.iterations);
        out.residual_mass += p.residual_mass;
    }
    return out;
}

Denotation denote(const Program& prog, const POVD& mu, const DenoteOptions& opt) { return denote(prog, *prog.body, mu, opt); }

Denotation denote_state(const Program& prog, const Com& c, const ClassicalState& sigma, const CMatrix& rho,
                        const DenoteOptions& opt) {
    return denote(prog, c, POVD(sigma, rho), opt);
}

WhileResult denote_while(const Program& prog, const BExp& b, const Com& body, const POVD& mu, const LoopOptions& opt) {
    check_dims(prog, mu);
    if (opt.cap <= 0 || opt.tol <= 0) throw std::invalid_argument("loop cap and tolerance must be positive");
    Denoter d(prog, body, opt);
    return d.loop(b, body, mu);
}

POVD while_approximant(const Program& prog, const BExp& b, const Com& body, const POVD& mu, std::int64_t n) {
    check_dims(prog, mu);
    if (n < 0) throw std::invalid_argument("approximant index must be non-negative");
    Denoter d(prog, body, {});
    const auto not_b = BExp::negate(std::make_shared<const BExp>(b));
    POVD out(mu.dim());
    POVD live = mu;
    for (std::int64_t k = 0;; ++k) {
        out += restrict(live, *not_b);
        if (k == n) break;
        live = d.eval(body, restrict(live, b));
    }
    return out;
}

}  // namespace qimp
