#pragma once

// Random assertions over a program's qubits, for property tests.

#include <random>
#include <string>
#include <vector>

#include "qimp/assertion.hpp"

namespace gen {

using namespace qimp;

class AssertionGen {
public:
    AssertionGen(std::mt19937_64& rng, const Program& prog, std::vector<std::string> vars = {"x", "y", "z"})
        : rng_(rng), prog_(prog), vars_(std::move(vars)) {
        for (const auto& [name, m] : builtin_measurements())
            meas_.push_back(std::make_shared<NamedMeasurement>(NamedMeasurement{name, m}));
        for (const auto& [name, m] : prog.measurements)
            meas_.push_back(std::make_shared<NamedMeasurement>(NamedMeasurement{name, m}));
        if (prog.qubits.size() >= 2) {
            // Rotated two-qubit basis measurement with pair labels.
            const CMatrix v = random_unitary4();
            std::vector<CMatrix> ops;
            std::vector<Label> labels;
            for (std::size_t k = 0; k < 4; ++k) {
                ops.push_back(CMatrix::basis_op(4, k, k) * v);
                labels.push_back({static_cast<std::int64_t>(k >> 1), static_cast<std::int64_t>(k & 1)});
            }
            meas_.push_back(std::make_shared<NamedMeasurement>(
                NamedMeasurement{"Pair", GeneralMeasurement(2, std::move(ops), std::move(labels))}));
        }
    }

    StateExprPtr sexpr(int depth, const std::vector<std::string>& extra = {}) {
        const int pick = int_in(0, depth <= 0 ? 1 : 5);
        switch (pick) {
            case 0: return StateExpr::lit(int_in(-2, 2));
            case 1: return StateExpr::var(var(extra));
            case 2: return StateExpr::ind(sassn(depth - 1, extra));
            case 3: return StateExpr::binary(StateExpr::Kind::Add, sexpr(depth - 1, extra), sexpr(depth - 1, extra));
            case 4: return StateExpr::binary(StateExpr::Kind::Sub, sexpr(depth - 1, extra), sexpr(depth - 1, extra));
            default: return StateExpr::binary(StateExpr::Kind::Mul, sexpr(0, extra), sexpr(depth - 1, extra));
        }
    }

    StateAssnPtr sassn(int depth, const std::vector<std::string>& extra = {}) {
        using K = StateAssn::Kind;
        const int pick = int_in(0, depth <= 0 ? 1 : 6);
        static const CmpOp ops[] = {CmpOp::Eq, CmpOp::Lt, CmpOp::Leq};
        switch (pick) {
            case 0:
            case 1:
                if (coin(0.1)) return StateAssn::truth(coin(0.5));
                return StateAssn::cmp(ops[int_in(0, 2)], sexpr(depth > 0 ? 1 : 0, extra), sexpr(depth > 0 ? 1 : 0, extra));
            case 2: return StateAssn::negate(sassn(depth - 1, extra));
            case 3: return StateAssn::junction(K::And, sassn(depth - 1, extra), sassn(depth - 1, extra));
            case 4: return StateAssn::junction(K::Or, sassn(depth - 1, extra), sassn(depth - 1, extra));
            case 5: return StateAssn::junction(K::Implies, sassn(depth - 1, extra), sassn(depth - 1, extra));
            default: {
                auto more = extra;
                more.push_back("k");
                return StateAssn::quantifier(coin(0.5) ? K::Forall : K::Exists, "k", int_in(-1, 0), int_in(0, 2),
                                             sassn(depth - 1, more));
            }
        }
    }

    /// Operator-valued expression; linear in the POVD.
    DistExprPtr op_expr(int depth) {
        const int pick = int_in(0, depth <= 0 ? 1 : 4);
        switch (pick) {
            case 0: return DistExpr::expect(sexpr(2));
            case 1: return mexpect();
            case 2: return DistExpr::binary(DistExpr::Kind::Add, op_expr(depth - 1), op_expr(depth - 1));
            case 3: return DistExpr::binary(DistExpr::Kind::Sub, op_expr(depth - 1), op_expr(depth - 1));
            default: return DistExpr::scale(int_in(-4, 4) * 0.5, op_expr(depth - 1));
        }
    }

    DistExprPtr mexpect() {
        const auto& m = meas_[int_in(0, static_cast<int>(meas_.size()) - 1)];
        std::vector<std::string> binders;
        static const char* pool[] = {"x", "y", "z", "u", "v"};
        while (binders.size() < m->meas.label_width()) {
            std::string b = pool[int_in(0, 4)];
            if (std::find(binders.begin(), binders.end(), b) == binders.end()) binders.push_back(b);
        }
        return DistExpr::mexpect(binders, m, distinct_qubits(m->meas.arity), sexpr(2, binders));
    }

    /// Scalar expression; with `homogeneous` it stays linear in the POVD.
    DistExprPtr scalar_expr(int depth, bool homogeneous = false) {
        const int pick = int_in(0, depth <= 0 ? 1 : 3);
        switch (pick) {
            case 0:
                if (!homogeneous) return DistExpr::constant(int_in(-2, 4) * 0.25);
                [[fallthrough]];
            case 1: return DistExpr::trace(op_expr(depth - 1));
            case 2: return DistExpr::binary(DistExpr::Kind::Add, scalar_expr(depth - 1, homogeneous), scalar_expr(depth - 1, homogeneous));
            default: return DistExpr::scale(int_in(-2, 2) * 0.5, scalar_expr(depth - 1, homogeneous));
        }
    }

    DistAssnPtr comparison(bool homogeneous) {
        static const CmpOp ops[] = {CmpOp::Eq, CmpOp::Leq, CmpOp::Leq, CmpOp::Lt};
        const auto op = ops[int_in(0, 3)];
        if (coin(0.6)) return DistAssn::cmp(op, op_expr(2), op_expr(2));
        return DistAssn::cmp(op, scalar_expr(2, homogeneous), scalar_expr(2, homogeneous));
    }

    /// Any assertion of the language except characteristic ones.
    DistAssnPtr assn(int depth) {
        using K = DistAssn::Kind;
        const int pick = int_in(0, depth <= 0 ? 2 : 9);
        switch (pick) {
            case 0: return comparison(false);
            case 1: return DistAssn::box(sassn(2));
            case 2: return coin(0.2) ? DistAssn::truth(coin(0.5)) : comparison(false);
            case 3: return DistAssn::negate(assn(depth - 1));
            case 4: return DistAssn::junction(K::And, assn(depth - 1), assn(depth - 1));
            case 5: return DistAssn::junction(K::Or, assn(depth - 1), assn(depth - 1));
            case 6: return DistAssn::junction(K::Implies, assn(depth - 1), assn(depth - 1));
            case 7: return DistAssn::oplus(assn(depth - 1), assn(depth - 1), coin(0.6) ? sassn(1) : nullptr);
            case 8: return DistAssn::quantifier(coin(0.5) ? K::Forall : K::Exists, "k", 0, int_in(0, 2), assn(depth - 1));
            default: return DistAssn::box(sassn(1));
        }
    }

    /// Assertions closed under sums of POVDs: homogeneous linear comparisons,
    /// boxes, conjunctions, bounded universals and guarded splits.
    DistAssnPtr additive(int depth) {
        using K = DistAssn::Kind;
        const int pick = int_in(0, depth <= 0 ? 1 : 5);
        switch (pick) {
            case 0: return comparison(true);
            case 1: return DistAssn::box(sassn(2));
            case 2: return DistAssn::junction(K::And, additive(depth - 1), additive(depth - 1));
            case 3:
            case 4: return DistAssn::oplus(additive(depth - 1), additive(depth - 1), sassn(1));
            default: return DistAssn::quantifier(K::Forall, "k", 0, int_in(0, 2), additive(depth - 1));
        }
    }

    bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }
    int int_in(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

private:
    std::string var(const std::vector<std::string>& extra) {
        const int n = static_cast<int>(vars_.size() + extra.size());
        const int k = int_in(0, n - 1);
        return k < static_cast<int>(vars_.size()) ? vars_[k] : extra[k - vars_.size()];
    }

    std::vector<std::string> distinct_qubits(std::size_t n) {
        std::vector<std::string> qs = prog_.qubits;
        std::shuffle(qs.begin(), qs.end(), rng_);
        qs.resize(n);
        return qs;
    }

    CMatrix random_unitary4() {
        // Gram-Schmidt on a complex Gaussian matrix.
        std::normal_distribution<double> g;
        std::vector<std::vector<Complex>> cols(4, std::vector<Complex>(4));
        for (auto& c : cols)
            for (auto& z : c) z = Complex(g(rng_), g(rng_));
        for (std::size_t j = 0; j < 4; ++j) {
            for (std::size_t k = 0; k < j; ++k) {
                Complex dot = 0;
                for (std::size_t i = 0; i < 4; ++i) dot += std::conj(cols[k][i]) * cols[j][i];
                for (std::size_t i = 0; i < 4; ++i) cols[j][i] -= dot * cols[k][i];
            }
            double norm = 0;
            for (auto& z : cols[j]) norm += std::norm(z);
            for (auto& z : cols[j]) z /= std::sqrt(norm);
        }
        CMatrix u(4, 4);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) u(i, j) = cols[j][i];
        return u;
    }

    std::mt19937_64& rng_;
    const Program& prog_;
    std::vector<std::string> vars_;
    std::vector<MeasurementPtr> meas_;
};

}  // namespace gen
