#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "qimp/densem.hpp"
#include "qimp/opsem.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace qimp;

namespace {

Program load(const std::string& name) {
    std::ifstream in(std::string(QIMP_SOURCE_DIR) + "/programs/" + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_program(ss.str());
}

CMatrix plus() { return oracle::pure({1 / std::sqrt(2.0), 1 / std::sqrt(2.0)}); }

/// Generated program that runs without overflow from both witnesses, or nullopt.
bool usable(const Program& p, const POVD& mu) {
    try {
        denote(p, mu, {.policy = ExecPolicy::Serial});
        return true;
    } catch (const OverflowError&) {
        return false;
    }
}

const Com& loop_of(const Program& p) {
    const Com* c = p.body.get();
    while (c->kind == Com::Kind::Seq) c = c->second.get();
    return *c;
}

}  // namespace

TEST(DenoteState, Examples) {
    auto p = parse_program("qubits q; main { abort }");
    EXPECT_TRUE(denote_state(p, *p.body, {{"x", 1}}, plus()).result.empty());

    auto s = parse_program("qubits q; main { skip }");
    auto r = denote_state(s, *s.body, {{"x", 1}}, plus());
    EXPECT_TRUE(povd_eq(r.result, POVD({{"x", 1}}, plus())));

    auto m = parse_program("qubits q; main { x := M[q] }");
    auto mr = denote_state(m, *m.body, {}, plus()).result;
    ASSERT_EQ(mr.support_size(), 2u);
    EXPECT_TRUE(approx_equal(mr.at({}), oracle::sandwich(CMatrix::basis_op(2, 0, 0), plus())));
    EXPECT_TRUE(approx_equal(mr.at({{"x", 1}}), 0.5 * CMatrix::basis_op(2, 1, 1)));
}

TEST(DenoteState, MeasurementMergesEqualLabels) {
    auto p = parse_program("qubits q; meas N = { 1: [[1, 0], [0, 0]], 1: [[0, 0], [0, 1]] }; main { x := N[q] }");
    auto r = denote_state(p, *p.body, {}, plus()).result;
    ASSERT_EQ(r.support_size(), 1u);
    EXPECT_TRUE(approx_equal(r.at({{"x", 1}}), 0.5 * CMatrix::identity(2)));
}

TEST(Denote, EmptyInput) {
    gen::ProgramGen g(1);
    auto p = g.program();
    EXPECT_TRUE(denote(p, empty_povd(p.dim())).result.empty());
}

TEST(Denote, LinearInTheInput) {
    std::mt19937_64 rng(2);
    int checked = 0;
    for (std::uint64_t seed = 0; seed < 80; ++seed) {
        gen::ProgramGen g(seed);
        auto p = g.program();
        auto m1 = gen::random_povd(rng, p.dim(), 0.5, {"x", "y"}, 2);
        auto m2 = gen::random_povd(rng, p.dim(), 0.5, {"x", "y"}, 2);
        if (!usable(p, povd_add(m1, m2))) continue;
        auto whole = denote(p, povd_add(m1, m2)).result;
        auto parts = povd_add(denote(p, m1).result, denote(p, m2).result);
        EXPECT_TRUE(povd_eq(whole, parts)) << pretty(p);
        ++checked;
    }
    EXPECT_GT(checked, 40);
}

TEST(Denote, SequenceComposes) {
    std::mt19937_64 rng(3);
    for (std::uint64_t seed = 100; seed < 160; ++seed) {
        gen::ProgramGen g(seed);
        auto p = g.program();
        if (p.body->kind != Com::Kind::Seq) continue;
        auto mu = gen::random_povd(rng, p.dim(), 1.0, {"x"}, 2);
        if (!usable(p, mu)) continue;
        auto direct = denote(p, *p.body, mu).result;
        auto staged = denote(p, *p.body->second, denote(p, *p.body->first, mu).result).result;
        EXPECT_TRUE(povd_eq(direct, staged)) << pretty(p);
    }
}

TEST(Denote, ConditionalDecomposes) {
    std::mt19937_64 rng(4);
    for (std::uint64_t seed = 200; seed < 260; ++seed) {
        gen::ProgramGen g(seed);
        auto p = g.program();
        auto b = g.bexp(2);
        auto c0 = p.body;
        auto c1 = gen::ProgramGen(seed + 1000).program().body;
        auto cond = Com::if_(b, c0, c1);
        auto mu = gen::random_povd(rng, p.dim(), 1.0, {"x", "y"}, 3);
        Program env = p;
        env.body = cond;
        if (!usable(env, mu)) continue;
        auto lhs = denote(env, *cond, mu).result;
        auto rhs = povd_add(denote(env, *c0, restrict(mu, *b)).result,
                            denote(env, *c1, restrict(mu, *BExp::negate(b))).result);
        EXPECT_TRUE(povd_eq(lhs, rhs)) << pretty(*cond);
    }
}

TEST(Denote, ResultsAreValidDistributions) {
    std::mt19937_64 rng(5);
    for (std::uint64_t seed = 300; seed < 400; ++seed) {
        gen::ProgramGen g(seed);
        auto p = g.program();
        auto mu = gen::random_povd(rng, p.dim(), 1.0, {"x", "y", "z"}, 3);
        if (!usable(p, mu)) continue;
        auto r = denote(p, mu).result;
        EXPECT_EQ(povd_violation(r), "") << pretty(p);
        EXPECT_LE(total_mass(r), total_mass(mu) + kEpsNum);
    }
}

TEST(DenoteWhile, FalseGuardIsIdentity) {
    auto p = parse_program("qubits q; main { while false do { H[q] } }");
    POVD mu({{"x", 2}}, plus());
    auto w = denote_while(p, *p.body->cond, *p.body->first, mu);
    EXPECT_TRUE(povd_eq(w.result, mu));
    EXPECT_TRUE(w.converged);
    EXPECT_EQ(w.iterations, 1);
}

TEST(DenoteWhile, CountingLoop) {
    auto p = parse_program("qubits q; main { x := 0; while x <= 2 do { x := x + 1 } }");
    auto rho = 0.5 * CMatrix::identity(2);
    auto d = denote_state(p, *p.body, {}, rho);
    EXPECT_TRUE(povd_eq(d.result, POVD({{"x", 3}}, rho)));
    EXPECT_TRUE(d.converged);
    EXPECT_EQ(d.iterations, 4);
}

TEST(DenoteWhile, TrueSkipConvergesToEmpty) {
    auto p = load("diverge.qimp");
    auto d = denote(p, POVD({{"x", 1}}, plus()));
    EXPECT_TRUE(d.result.empty());
    EXPECT_TRUE(d.converged);
}

TEST(DenoteWhile, PeriodicLoopIsTrapped) {
    auto p = parse_program("qubits q; main { while true do { X[q]; x := 1 - x } }");
    auto d = denote(p, POVD({}, CMatrix::basis_op(2, 0, 0)));
    EXPECT_TRUE(d.result.empty());
    EXPECT_TRUE(d.converged);
}

TEST(DenoteWhile, RepeatUntilSuccess) {
    auto p = load("coin.qimp");
    auto d = denote(p, POVD({}, CMatrix::basis_op(2, 1, 1)));
    EXPECT_TRUE(d.converged);
    ASSERT_EQ(d.result.support_size(), 1u);
    EXPECT_TRUE(approx_equal(d.result.at({{"x", 1}}), CMatrix::basis_op(2, 1, 1), 1e-8));
}

TEST(DenoteWhile, CapReportsNonConvergence) {
    auto p = load("coin.qimp");
    DenoteOptions opt;
    opt.loop.cap = 5;
    auto d = denote(p, POVD({}, CMatrix::basis_op(2, 0, 0)), opt);
    EXPECT_FALSE(d.converged);
    EXPECT_EQ(d.iterations, 5);
    EXPECT_NEAR(d.residual_mass, 1.0 / 16, 1e-12);
    EXPECT_NEAR(total_mass(d.result) + d.residual_mass, 1.0, 1e-12);
}

TEST(DenoteWhile, ApproximantsIncrease) {
    auto p = load("coin.qimp");
    const Com& loop = loop_of(p);
    POVD mu({}, 0.9 * plus());
    POVD prev = while_approximant(p, *loop.cond, *loop.first, mu, 0);
    for (int n = 1; n < 12; ++n) {
        POVD next = while_approximant(p, *loop.cond, *loop.first, mu, n);
        EXPECT_TRUE(povd_leq(prev, next));
        for (const auto& [s, rho] : prev.entries()) EXPECT_TRUE(next.contains(s));
        prev = next;
    }
}

TEST(DenoteWhile, ApproximantMatchesSyntacticUnrolling) {
    std::mt19937_64 rng(6);
    const std::vector<std::string> loops = {
        "qubits q, r; main { while x <= 1 do { H[q]; x := M[q]; y := y + 1 } }",
        "qubits q, r; main { while not x = y do { CNOT[q, r]; y := M[r]; x := x + 1 } }",
        "qubits q, r; main { while x <= 2 do { if y = 0 then { abort } else { x := x + 1 }; H[r]; y := M[r] } }",
    };
    for (const auto& src : loops) {
        auto p = parse_program(src);
        const Com& loop = *p.body;
        auto mu = gen::random_povd(rng, p.dim(), 1.0, {"x", "y"}, 3, 0, 2);
        auto step = Com::if_(loop.cond, loop.first, Com::skip());
        for (int n = 0; n <= 4; ++n) {
            std::vector<ComPtr> parts(n, step);
            parts.push_back(Com::if_(loop.cond, Com::abort(), Com::skip()));
            auto unrolled = seq_chain(parts);
            auto syntactic = denote(p, *unrolled, mu).result;
            auto incremental = while_approximant(p, *loop.cond, *loop.first, mu, n);
            EXPECT_TRUE(povd_eq(syntactic, incremental)) << src << " n=" << n;
        }
    }
}

TEST(Consistency, OperationalAndDenotationalAgree) {
    std::mt19937_64 rng(7);
    int checked = 0;
    for (std::uint64_t seed = 0; checked < 220 && seed < 1000; ++seed) {
        gen::ProgramGen g(seed);
        auto p = g.program();
        auto mu = gen::random_povd(rng, p.dim(), 1.0, {"x", "y"}, 2);
        Denotation d;
        try {
            d = denote(p, mu);
        } catch (const OverflowError&) {
            continue;
        }
        ASSERT_TRUE(d.converged);
        auto r = run(p, mu, {.fuel = 100000});
        ASSERT_EQ(r.residual_mass, 0.0) << pretty(p);
        EXPECT_TRUE(povd_eq(d.result, r.terminal)) << pretty(p);
        ++checked;
    }
    EXPECT_GE(checked, 200);
}

TEST(Consistency, ParallelMatchesSerial) {
    std::mt19937_64 rng(8);
    for (std::uint64_t seed = 500; seed < 560; ++seed) {
        gen::ProgramGen g(seed);
        auto p = g.program();
        auto mu = gen::random_povd(rng, p.dim(), 1.0, {"x", "y"}, 4);
        if (!usable(p, mu)) continue;
        auto a = denote(p, mu, {.policy = ExecPolicy::Serial}).result;
        auto b = denote(p, mu, {.policy = ExecPolicy::Parallel}).result;
        ASSERT_EQ(a.support_size(), b.support_size());
        for (const auto& [s, rho] : a.entries()) EXPECT_EQ(b.at(s), rho);
    }
}

TEST(Denote, OverflowIsAnError) {
    auto p = parse_program("qubits q; main { x := x * x }");
    EXPECT_THROW(denote(p, POVD({{"x", std::int64_t{1} << 40}}, plus())), OverflowError);
    EXPECT_THROW(denote(p, POVD({}, 0.25 * CMatrix::identity(4))), DimensionError);
}
