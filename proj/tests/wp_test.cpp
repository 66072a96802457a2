#include <gtest/gtest.h>

#include <json.hpp>

#include "qimp/densem.hpp"
#include "qimp/opsem.hpp"
#include "qimp/witness.hpp"
#include "qimp/wp.hpp"
#include "support/assertion_gen.hpp"
#include "support/corpus.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace qimp;

namespace {

const Program& two_qubit_program() {
    static const Program p = parse_program(
        "qubits q0, q1;\n"
        "gate R = [[0.6, -0.8], [0.8, 0.6]];\n"
        "meas W = { 0: [[0.6, 0], [0, 1]], 2: [[0.8, 0], [0, 0]] };\n"
        "main { skip }");
    return p;
}

const std::vector<std::string> kVars = {"x", "y", "z"};

bool same_value(const DistValue& a, const DistValue& b) {
    if (a.is_operator != b.is_operator) return false;
    if (a.is_operator) return max_norm_distance(a.op, b.op) <= 1e-9;
    return std::abs(a.scalar - b.scalar) <= 1e-9;
}

POVD after(const Program& p, const ComPtr& c, const POVD& mu) { return denote(p, *c, mu).result; }

DistAssnPtr parse(const std::string& text, const Program& p) { return parse_assertion(text, AssertionContext::of(p)); }

/// Follows a path of split sides through (+) and the non-box side of conjunctions.
DistAssnPtr leaf(DistAssnPtr p, const std::vector<int>& sides) {
    std::size_t k = 0;
    for (;;) {
        if (p->kind == DistAssn::Kind::OPlus) {
            p = sides.at(k++) == 0 ? p->p0 : p->p1;
        } else if (p->kind == DistAssn::Kind::And) {
            p = p->p1->kind == DistAssn::Kind::Box ? p->p0 : p->p1;
        } else {
            return p;
        }
    }
}

/// Four operators, each with a single unit entry at (row, cols[i]).
void expect_unit_measurement(const GeneralMeasurement& m, std::size_t row, const std::vector<std::size_t>& cols,
                             const Label& label) {
    ASSERT_EQ(m.size(), cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) {
        EXPECT_LE(oracle::max_diff(m.operators[i], CMatrix::basis_op(4, row, cols[i])), 1e-9) << "operator " << i;
        EXPECT_EQ(m.labels[i], label);
    }
}

}  // namespace

// --- classical substitution ---

TEST(SubstAssign, Examples) {
    const auto& p = two_qubit_program();
    const auto ctx = AssertionContext::of(p);
    const auto one = parse_program("main { x := x + 1 }").body->expr;
    EXPECT_EQ(pretty(*subst_assign(parse("E[x] = E[ind(true)]", p), *one, "x"), ctx), "E[x + 1] = E[ind(true)]");
    EXPECT_EQ(pretty(*subst_assign(parse("box(x = 0)", p), *AExp::lit(0), "x"), ctx), "box(0 = 0)");
    // Bound occurrences are left alone.
    EXPECT_EQ(pretty(*subst_assign(parse("E[x ~ M[q0]](x + y) = E[x]", p), *one, "x"), ctx),
              "E[x ~ M[q0]](x + y) = E[x + 1]");
    EXPECT_EQ(pretty(*subst_assign(parse("forall x in 0..1: box(x = y)", p), *one, "x"), ctx),
              "(forall x in 0..1: box(x = y))");
    // Guards are substituted as well.
    EXPECT_EQ(pretty(*subst_assign(parse("true (+) true split on x = 1", p), *one, "x"), ctx),
              "true (+) true split on x + 1 = 1");
}

TEST(SubstAssign, CaptureAvoidance) {
    const auto& p = two_qubit_program();
    const auto ctx = AssertionContext::of(p);
    reset_fresh_names();
    const auto a = parse_program("main { x := y }").body->expr;
    const auto got = subst_assign(parse("E[y ~ M[q0]](x + y) = E[x]", p), *a, "x");
    EXPECT_EQ(pretty(*got, ctx), "E[$f1 ~ M[q0]](y + $f1) = E[y]");
    EXPECT_THROW(subst_assign(parse("E[y ~ M[q0]](x + y) = E[x]", p), *a, "x", CaptureMode::Strict),
                 SubstitutionError);
    EXPECT_THROW(subst_assign(parse("E[x ~ M[q0]](x) = E[1]", p), *a, "x", CaptureMode::Strict), SubstitutionError);
    EXPECT_NO_THROW(subst_assign(parse("E[z ~ M[q0]](x + z) = E[x]", p), *a, "x", CaptureMode::Strict));
    const auto ch = parse("char { (): [[1, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0], [0, 0, 0, 0]] }", p);
    EXPECT_THROW(subst_assign(ch, *a, "x"), SubstitutionError);
}

TEST(SubstAssign, StateLevelClauses) {
    // e[a/x] at sigma equals e at sigma[a(sigma)/x]; likewise for state assertions.
    std::mt19937_64 rng(71);
    gen::ProgramGen pg(72);
    gen::AssertionGen g(rng, two_qubit_program());
    for (int i = 0; i < 500; ++i) {
        const auto a = pg.aexp(2);
        const auto x = kVars[g.int_in(0, 2)];
        ClassicalState sigma;
        for (const auto& v : kVars) sigma = sigma.updated(v, g.int_in(-2, 2));
        const auto sigma2 = sigma.updated(x, eval_aexp(*a, sigma));

        const auto e = g.sexpr(3);
        const auto e_sub = subst_assign(DistExpr::expect(e), *a, x)->body;
        ASSERT_EQ(eval_state_expr(*e_sub, sigma), eval_state_expr(*e, sigma2));

        const auto psi = g.sassn(3);
        const auto psi_sub = subst_assign(DistAssn::box(psi), *a, x)->guard;
        ASSERT_EQ(eval_state_assn(*psi_sub, sigma), eval_state_assn(*psi, sigma2)) << pretty(*psi);
    }
}

TEST(SubstAssign, ExpressionsFollowTheCommand) {
    const auto& p = two_qubit_program();
    const auto ctx = AssertionContext::of(p);
    std::mt19937_64 rng(73);
    gen::ProgramGen pg(74);
    gen::AssertionGen g(rng, p);
    for (int i = 0; i < 500; ++i) {
        const auto a = pg.aexp(2);
        const auto x = kVars[g.int_in(0, 2)];
        const auto mu = gen::random_povd(rng, 4, 1.0, kVars);
        const auto r = g.coin(0.7) ? g.op_expr(3) : g.scalar_expr(3);
        const auto lhs = eval_dist_expr(*subst_assign(r, *a, x), mu, ctx);
        const auto rhs = eval_dist_expr(*r, after(p, Com::assign(x, a), mu), ctx);
        ASSERT_TRUE(same_value(lhs, rhs)) << pretty(*r);
    }
}

TEST(SubstAssign, RewrittenAssertionImpliesPost) {
    const auto& p = two_qubit_program();
    const auto ctx = AssertionContext::of(p);
    std::mt19937_64 rng(75);
    gen::ProgramGen pg(76);
    gen::AssertionGen g(rng, p);
    int premises = 0;
    for (int i = 0; i < 500; ++i) {
        const auto a = pg.aexp(2);
        const auto x = kVars[g.int_in(0, 2)];
        const auto mu = gen::random_povd(rng, 4, 1.0, kVars);
        const auto P = g.assn(3);
        if (holds(*subst_assign(P, *a, x), mu, ctx) != Truth::True) continue;
        ++premises;
        ASSERT_EQ(holds(*P, after(p, Com::assign(x, a), mu), ctx), Truth::True) << pretty(*P, ctx);
    }
    EXPECT_GT(premises, 50);
}

// --- initialisation ---

TEST(SubstInit, Examples) {
    const auto& p = two_qubit_program();
    const auto ctx = AssertionContext::of(p);
    reset_fresh_names();
    const auto h = subst_h(parse("E[x] <= E[1]", p), "q1", ctx);
    ASSERT_EQ(h->kind, DistAssn::Kind::Cmp);
    EXPECT_EQ(h->lhs->kind, DistExpr::Kind::MExpect);
    EXPECT_EQ(h->rhs->kind, DistExpr::Kind::MExpect);
    EXPECT_EQ(pretty_body(*h), "E[$f1 ~ $m1[q1]](x) <= E[$f2 ~ $m1[q1]](1)");
    // Box is unaffected by initialisation.
    EXPECT_TRUE(equal(*subst_h(parse("box(x = 1)", p), "q0", ctx), *parse("box(x = 1)", p)));

    std::mt19937_64 rng(1);
    for (int i = 0; i < 20; ++i) {
        const auto mu = gen::random_povd(rng, 4, 1.0, kVars);
        const auto r = DistExpr::expect(StateExpr::ind(StateAssn::truth(true)));
        const auto lhs = eval_dist_expr(*subst_h(r, "q0", ctx), mu, ctx);
        const auto rhs = eval_dist_expr(*r, after(p, Com::qinit("q0"), mu), ctx);
        EXPECT_TRUE(same_value(lhs, rhs));
    }
}

TEST(SubstInit, ExpressionsFollowTheCommand) {
    const auto& p = two_qubit_program();
    const auto ctx = AssertionContext::of(p);
    std::mt19937_64 rng(81);
    gen::AssertionGen g(rng, p);
    for (int i = 0; i < 500; ++i) {
        const auto q = p.qubits[g.int_in(0, 1)];
        const auto mu = gen::random_povd(rng, 4, 1.0, kVars);
        const auto r = g.coin(0.7) ? g.op_expr(3) : g.scalar_expr(3);
        const auto lhs = eval_dist_expr(*subst_h(r, q, ctx), mu, ctx);
        const auto rhs = eval_dist_expr(*r, after(p, Com::qinit(q), mu), ctx);
        ASSERT_TRUE(same_value(lhs, rhs)) << pretty(*r);
    }
}

TEST(SubstInit, RewrittenAssertionImpliesPost) {
    const auto& p = two_qubit_program();
    const auto ctx = AssertionContext::of(p);
    std::mt19937_64 rng(82);
    gen::AssertionGen g(rng, p);
    int premises = 0;
    for (int i = 0; i < 500; ++i) {
        const auto q = p.qubits[g.int_in(0, 1)];
        const auto mu = gen::random_povd(rng, 4, 1.0, kVars);
        const auto P = g.assn(3);
        if (holds(*subst_h(P, q, ctx), mu, ctx) != Truth::True) continue;
        ++premises;
        ASSERT_EQ(holds(*P, after(p, Com::qinit(q), mu), ctx), Truth::True) << pretty(*P, ctx);
    }
    EXPECT_GT(premises, 50);
}

// --- unitaries ---

TEST(SubstGate, Examples) {
    const auto& p = two_qubit_program();
    const auto ctx = AssertionContext::of(p);
    std::mt19937_64 rng(2);
    gen::AssertionGen g(rng, p);
    const UnitaryGate id(1, gates::I());
    const UnitaryGate h(1, gates::H());
    for (int i = 0; i < 50; ++i) {
        const auto mu = gen::random_povd(rng, 4, 1.0, kVars);
        const auto r = g.op_expr(3);
        EXPECT_TRUE(same_value(eval_dist_expr(*subst_g(r, id, {"q1"}, ctx), mu, ctx), eval_dist_expr(*r, mu, ctx)));
        // H is its own inverse, so applying the substitution twice is neutral.
        const auto m = parse("E[y ~ M[q0]](y + x) = E[1]", p)->lhs;
        const auto twice = subst_g(subst_g(m, h, {"q0"}, ctx), h, {"q0"}, ctx);
        EXPECT_TRUE(same_value(eval_dist_expr(*twice, mu, ctx), eval_dist_expr(*m, mu, ctx)));
    }
    EXPECT_THROW(subst_g(parse("E[x] = E[1]", p), UnitaryGate(2, gates::CNOT()), {"q0"}, ctx), SubstitutionError);
}

TEST(SubstGate, ExpressionsFollowTheCommand) {
    const auto& p = two_qubit_program();
    const auto ctx = AssertionContext::of(p);
    std::mt19937_64 rng(91);
    gen::AssertionGen g(rng, p);
    const std::vector<std::pair<std::string, std::vector<std::string>>> apps = {
        {"H", {"q0"}}, {"X", {"q1"}}, {"Z", {"q0"}}, {"R", {"q1"}}, {"CNOT", {"q0", "q1"}}, {"CNOT", {"q1", "q0"}}};
    for (int i = 0; i < 500; ++i) {
        const auto& [gate, qs] = apps[g.int_in(0, static_cast<int>(apps.size()) - 1)];
        const auto mu = gen::random_povd(rng, 4, 1.0, kVars);
        const auto r = g.coin(0.7) ? g.op_expr(3) : g.scalar_expr(3);
        const auto lhs = eval_dist_expr(*subst_g(r, *p.find_gate(gate), qs, ctx), mu, ctx);
        const auto rhs = eval_dist_expr(*r, after(p, Com::qunit(gate, qs), mu), ctx);
        ASSERT_TRUE(same_value(lhs, rhs)) << gate << " " << pretty(*r);
    }
}

TEST(SubstGate, RewrittenAssertionImpliesPost) {
    const auto& p = two_qubit_program();
    const auto ctx = AssertionContext::of(p);
    std::mt19937_64 rng(92);
    gen::AssertionGen g(rng, p);
    int premises = 0;
    for (int i = 0; i < 500; ++i) {
        const std::string gate = g.coin(0.5) ? "R" : "CNOT";
        const std::vector<std::string> qs = gate == "R" ? std::vector<std::string>{"q0"} : p.qubits;
        const auto mu = gen::random_povd(rng, 4, 1.0, kVars);
        const auto P = g.assn(3);
        if (holds(*subst_g(P, *p.find_gate(gate), qs, ctx), mu, ctx) != Truth::True) continue;
        ++premises;
        ASSERT_EQ(holds(*P, after(p, Com::qunit(gate, qs), mu), ctx), Truth::True) << pretty(*P, ctx);
    }
    EXPECT_GT(premises, 50);
}

// --- measurement ---

TEST(SubstMeasure, SuperdenseDecodingSteps) {
    const Program sc = corpus::load("sc.qimp");
    const auto ctx = AssertionContext::of(sc);
    reset_fresh_names();
    const auto m = std::make_shared<NamedMeasurement>(NamedMeasurement{"M", gates::computational()});
    const auto post = parse_assertion("box(x0 = y0 and x1 = y1)", ctx);
    const auto after_y1 = subst_f(post, "y1", m, {"q1"}, ctx);
    EXPECT_EQ(pretty(*after_y1, ctx),
              "E[y1 ~ M[q1]](ind(x0 = y0 and x1 = y1)) = E[y1 ~ M[q1]](ind(true))");
    const auto after_y0 = subst_f(after_y1, "y0", m, {"q0"}, ctx);
    EXPECT_EQ(pretty_body(*after_y0),
              "E[y0, y1 ~ $m1[q0, q1]](ind(x0 = y0 and x1 = y1)) = E[y0, y1 ~ $m1[q0, q1]](ind(true))");
    const auto& composed = after_y0->lhs->meas->meas;
    ASSERT_EQ(composed.size(), 4u);
    for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_LE(oracle::max_diff(composed.operators[k], CMatrix::basis_op(4, k, k)), 1e-12);
        EXPECT_EQ(composed.labels[k], (Label{static_cast<std::int64_t>(k >> 1), static_cast<std::int64_t>(k & 1)}));
    }
}

TEST(SubstMeasure, Examples) {
    const auto& p = two_qubit_program();
    const auto ctx = AssertionContext::of(p);
    std::mt19937_64 rng(4);
    gen::AssertionGen g(rng, p, {"x", "y"});
    // The trivial measurement only tags z with 0.
    const auto trivial = std::make_shared<NamedMeasurement>(
        NamedMeasurement{"T", GeneralMeasurement::with_index_labels(1, {CMatrix::identity(2)})});
    for (int i = 0; i < 50; ++i) {
        const auto mu = gen::random_povd(rng, 4, 1.0, {"x", "y"});
        const auto r = g.op_expr(3);
        EXPECT_TRUE(same_value(eval_dist_expr(*subst_f(r, "z", trivial, {"q0"}, ctx), mu, ctx),
                               eval_dist_expr(*r, mu, ctx)));
    }
    // Rebinding: an inner measurement that already binds x keeps only its own label.
    reset_fresh_names();
    const auto m = std::make_shared<NamedMeasurement>(NamedMeasurement{"M", gates::computational()});
    const auto f = subst_f(parse("E[x ~ M[q1]](x) = E[1]", p), "x", m, {"q0"}, ctx);
    EXPECT_EQ(f->lhs->binders, std::vector<std::string>{"x"});
    EXPECT_EQ(f->lhs->meas->meas.size(), 4u);
    EXPECT_EQ(f->lhs->meas->meas.labels[1], Label{1});
    // A split on the measured variable turns into box conjuncts.
    const auto s = subst_f(parse("box(x = 0) (+) true split on x = 0", p), "x", m, {"q0"}, ctx);
    EXPECT_EQ(s->kind, DistAssn::Kind::OPlus);
    EXPECT_EQ(s->guard, nullptr);
    const auto kept = subst_f(parse("box(x = 0) (+) true split on y = 0", p), "x", m, {"q0"}, ctx);
    EXPECT_NE(kept->guard, nullptr);
}

TEST(SubstMeasure, ExpressionsFollowTheCommand) {
    const auto& p = two_qubit_program();
    const auto ctx = AssertionContext::of(p);
    std::mt19937_64 rng(101);
    gen::AssertionGen g(rng, p);
    for (int i = 0; i < 500; ++i) {
        const std::string meas = g.coin(0.5) ? "M" : "W";
        const auto q = p.qubits[g.int_in(0, 1)];
        const auto x = kVars[g.int_in(0, 2)];
        const auto m = std::make_shared<NamedMeasurement>(NamedMeasurement{meas, *p.find_measurement(meas)});
        const auto mu = gen::random_povd(rng, 4, 1.0, kVars);
        const auto r = g.coin(0.7) ? g.op_expr(3) : g.scalar_expr(3);
        const auto lhs = eval_dist_expr(*subst_f(r, x, m, {q}, ctx), mu, ctx);
        const auto rhs = eval_dist_expr(*r, after(p, Com::qmeas(x, meas, {q}), mu), ctx);
        ASSERT_TRUE(same_value(lhs, rhs)) << x << " := " << meas << "[" << q << "] on " << pretty(*r);
    }
}

TEST(SubstMeasure, RewrittenAssertionImpliesPost) {
    const auto& p = two_qubit_program();
    const auto ctx = AssertionContext::of(p);
    std::mt19937_64 rng(102);
    gen::AssertionGen g(rng, p);
    int premises = 0;
    for (int i = 0; i < 500; ++i) {
        const std::string meas = g.coin(0.5) ? "M" : "W";
        const auto q = p.qubits[g.int_in(0, 1)];
        const auto x = kVars[g.int_in(0, 2)];
        const auto m = std::make_shared<NamedMeasurement>(NamedMeasurement{meas, *p.find_measurement(meas)});
        const auto mu = gen::random_povd(rng, 4, 1.0, kVars);
        const auto P = g.assn(3);
        if (holds(*subst_f(P, x, m, {q}, ctx), mu, ctx) != Truth::True) continue;
        ++premises;
        ASSERT_EQ(holds(*P, after(p, Com::qmeas(x, meas, {q}), mu), ctx), Truth::True) << pretty(*P, ctx);
    }
    EXPECT_GT(premises, 50);
}

TEST(FreshNames, StayInReservedNamespace) {
    const Program sc = corpus::load("sc.qimp");
    const auto ctx = AssertionContext::of(sc);
    const auto pre = pc(sc, parse_assertion("box(x0 = y0 and x1 = y1)", ctx));
    const auto program_vars = classical_vars(sc);
    for (const auto& v : bound_vars(*pre)) {
        if (v.front() == '$') {
            EXPECT_EQ(program_vars.count(v), 0u);
        } else {
            EXPECT_TRUE(v == "y0" || v == "y1") << v;
        }
    }
    for (const auto& m : measurements_of(*pre)) EXPECT_TRUE(m->name == "M" || m->name.front() == '$') << m->name;
    EXPECT_NE(fresh_var(), fresh_var());
}

// --- precondition calculus ---

TEST(Pc, Examples) {
    const auto p = corpus::load("skip.qimp");
    const auto ctx = AssertionContext::of(p);
    const auto post = parse_assertion("E[x ~ M[q]](x) <= E[1] and box(y = 2)", ctx);
    EXPECT_TRUE(equal(*pc(p, post), *post));

    const auto assign = parse_program("qubits q; main { x := x + 1 }");
    const auto ctx2 = AssertionContext::of(assign);
    EXPECT_EQ(pretty(*pc(assign, parse_assertion("box(x = 2)", ctx2)), ctx2), "box(x + 1 = 2)");

    const auto ab = parse_program("qubits q; main { abort }");
    EXPECT_EQ(pc(ab, DistAssn::box(StateAssn::truth(false)))->kind, DistAssn::Kind::True);
    EXPECT_THROW(pc(ab, DistAssn::box(StateAssn::truth(true))), PcError);

    const auto loop = corpus::load("loop.qimp");
    try {
        pc(loop, DistAssn::truth(true));
        FAIL() << "expected PcError";
    } catch (const PcError& e) {
        EXPECT_GT(e.loc().line, 0);
        EXPECT_NE(std::string(e.what()).find("loop"), std::string::npos);
    }
}

TEST(Pc, ConditionalShape) {
    const auto p = parse_program("qubits q; main { if x = 1 then { X[q] } else { skip } }");
    const auto ctx = AssertionContext::of(p);
    reset_fresh_names();
    const auto pre = pc(p, parse_assertion("E[1] = E[x]", ctx));
    EXPECT_EQ(pretty_body(*pre),
              "E[$f1 ~ $m1[q]](1) = E[$f2 ~ $m1[q]](x) and box(x = 1) (+) E[1] = E[x] and box(x != 1) split on x = 1");
}

TEST(Pc, SuperdenseSimplifiedMeasurements) {
    const Program sc = corpus::load("sc.qimp");
    const auto ctx = AssertionContext::of(sc);
    const auto pre = simplify_measurements(pc(sc, parse_assertion("box(x0 = y0 and x1 = y1)", ctx)));
    const std::vector<std::size_t> cols = {0, 2, 1, 3};
    struct Case {
        std::vector<int> sides;
        std::size_t row;
        Label label;
    };
    // Outer split on x1 = 1, inner split on x0 = 1.
    for (const Case& c : {Case{{0, 0}, 3, {1, 1}}, Case{{1, 0}, 2, {1, 0}}, Case{{0, 1}, 1, {0, 1}},
                          Case{{1, 1}, 0, {0, 0}}}) {
        const auto l = leaf(pre, c.sides);
        ASSERT_EQ(l->kind, DistAssn::Kind::Cmp) << pretty_body(*l);
        ASSERT_EQ(l->lhs->kind, DistExpr::Kind::MExpect);
        EXPECT_EQ(l->lhs->binders, (std::vector<std::string>{"y0", "y1"}));
        SCOPED_TRACE("row " + std::to_string(c.row));
        expect_unit_measurement(l->lhs->meas->meas, c.row, cols, c.label);
        EXPECT_EQ(l->lhs->meas, l->rhs->meas);
    }
}

TEST(Pc, SimplifyKeepsValues) {
    const Program sc = corpus::load("sc.qimp");
    const auto ctx = AssertionContext::of(sc);
    const auto pre = pc(sc, parse_assertion("box(x0 = y0 and x1 = y1)", ctx));
    const auto simple = simplify_measurements(pre);
    const auto before = measurements_of(*pre);
    const auto after_s = measurements_of(*simple);
    ASSERT_EQ(before.size(), after_s.size());
    std::mt19937_64 rng(5);
    for (std::size_t k = 0; k < before.size(); ++k) {
        EXPECT_EQ(before[k]->name, after_s[k]->name);
        EXPECT_LE(after_s[k]->meas.size(), before[k]->meas.size());
        for (int i = 0; i < 20; ++i) {
            const auto mu = gen::random_povd(rng, 4, 1.0, {"x0", "x1", "y0", "y1"}, 3, 0, 1);
            const auto body = StateExpr::binary(StateExpr::Kind::Add, StateExpr::var("y0"), StateExpr::var("x1"));
            const auto width = before[k]->meas.label_width();
            std::vector<std::string> binders;
            for (std::size_t b = 0; b < width; ++b) binders.push_back("b" + std::to_string(b));
            const auto r0 = DistExpr::mexpect(binders, before[k], sc.qubits, body);
            const auto r1 = DistExpr::mexpect(binders, after_s[k], sc.qubits, body);
            EXPECT_TRUE(same_value(eval_dist_expr(*r0, mu, ctx), eval_dist_expr(*r1, mu, ctx)));
        }
    }
    const auto id = GeneralMeasurement::with_index_labels(1, {CMatrix::identity(2)});
    const auto s = simplify_measurement(id);
    EXPECT_EQ(s.operators, id.operators);
    EXPECT_EQ(s.labels, id.labels);
}

TEST(Pc, SuperdensePreconditionHoldsEverywhere) {
    const Program sc = corpus::load("sc.qimp");
    const auto ctx = AssertionContext::of(sc);
    const auto pre = simplify_measurements(pc(sc, parse_assertion("box(x0 = y0 and x1 = y1)", ctx)));
    // The printed form parses back to the same assertion.
    const auto text = pretty(*pre, ctx);
    const auto back = parse_assertion(text, ctx);
    EXPECT_TRUE(equal(*back, *pre));

    auto ws = basis_witnesses(2, {"x0", "x1"}, 0, 1);
    WitnessOptions opt;
    opt.seed = 7;
    opt.vars = {"x0", "x1", "y0", "y1"};
    for (auto& w : random_witnesses(50, 2, opt)) ws.push_back(std::move(w));
    for (const auto& w : ws) {
        EXPECT_EQ(holds(*pre, w.povd, ctx), Truth::True) << w.id;
        EXPECT_EQ(holds(*back, w.povd, ctx), Truth::True) << w.id;
    }
}

TEST(Pc, SoundAtWitnesses) {
    int premises = 0;
    int checked = 0;
    for (std::uint64_t seed = 0; checked < 500; ++seed) {
        gen::ProgramShape shape;
        shape.allow_abort = false;
        shape.allow_loops = false;
        shape.max_statements = 8;
        gen::ProgramGen pg(1000 + seed, shape);
        const Program prog = pg.program();
        const auto ctx = AssertionContext::of(prog);
        gen::AssertionGen g(pg.rng(), prog);
        const auto post = g.additive(3);
        const auto pre = pc(prog, post);
        for (int k = 0; k < 3; ++k, ++checked) {
            const auto mu = gen::random_povd(pg.rng(), 4, 1.0, kVars, pg.int_in(1, 3), 0, 1);
            if (holds(*pre, mu, ctx) != Truth::True) continue;
            ++premises;
            const auto out = denote(prog, mu).result;
            ASSERT_EQ(holds(*post, out, ctx), Truth::True) << pretty(prog) << "\n" << pretty(*post, ctx);
        }
    }
    EXPECT_GT(premises, 50);
}

// --- triples ---

TEST(Triple, ParsesCorpusFiles) {
    const auto t = load_triple(corpus::path("sc.qhl"));
    EXPECT_EQ(t.program_path, "sc.qimp");
    EXPECT_EQ(t.pre->kind, DistAssn::Kind::True);
    EXPECT_EQ(pretty_body(*t.post), "box(x0 = y0 and x1 = y1)");
    EXPECT_THROW(parse_triple("pre: true\npost: true\n", corpus::path("")), ParseError);
    EXPECT_THROW(parse_triple("pre: true\nprog: sc.qimp\npost: box(\n", corpus::path("")), ParseError);
    EXPECT_THROW(parse_triple("pre: true\nprog: missing.qimp\npost: true\n", corpus::path("")), FormatError);
    try {
        parse_triple("prog: sc.qimp\npre: true\n\npost:\n  box(x0 =)\n", corpus::path(""));
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.loc().line, 5);
    }
}

TEST(Triple, SuperdenseCodingPassesInEveryMode) {
    const auto t = load_triple(corpus::path("sc.qhl"));
    auto ws = basis_witnesses(2, {"x0", "x1"}, 0, 1);
    WitnessOptions opt;
    opt.seed = 2024;
    opt.vars = triple_vars(t);
    for (auto& w : random_witnesses(50, 2, opt)) ws.push_back(std::move(w));
    ASSERT_EQ(ws.size(), 54u);
    for (auto mode : {CheckMode::Semantic, CheckMode::Pc, CheckMode::Both}) {
        const auto report = check_triple(t, ws, mode);
        EXPECT_EQ(report.overall(), Truth::True) << to_string(mode);
        EXPECT_EQ(report.count(Truth::True), ws.size());
    }
}

TEST(Triple, WrongPostconditionHasCounterexample) {
    const auto t = load_triple(corpus::path("sc_wrong.qhl"));
    const auto ws = basis_witnesses(2, {"x0", "x1"}, 0, 1);
    const auto report = check_triple(t, ws, CheckMode::Semantic);
    EXPECT_EQ(report.overall(), Truth::False);
    const auto ctx = AssertionContext::of(t.program);
    for (const auto& v : report.verdicts) {
        ASSERT_EQ(v.verdict, Truth::False);
        ASSERT_TRUE(v.output.has_value());
        // The counterexample output agrees with the operational semantics.
        const auto& w = *std::find_if(ws.begin(), ws.end(), [&](const Witness& x) { return x.id == v.id; });
        EXPECT_TRUE(povd_eq(*v.output, run(t.program, w.povd).terminal, 1e-9));
        EXPECT_EQ(holds(*t.post, *v.output, ctx), Truth::False);
    }
    const auto doc = nlohmann::json::parse(report_to_json(report, t));
    EXPECT_EQ(doc["verdict"], "false");
    const auto back = povd_from_json(doc["witnesses"][0]["output"].dump());
    EXPECT_TRUE(povd_eq(back.povd, *report.verdicts[0].output, 1e-12));
}

TEST(Triple, VacuousCases) {
    const auto sc = load_triple(corpus::path("sc.qhl"));
    Triple t = sc;
    t.pre = DistAssn::truth(false);
    WitnessOptions opt;
    opt.vars = {"x0", "x1"};
    const auto ws = random_witnesses(10, 2, opt);
    for (auto mode : {CheckMode::Semantic, CheckMode::Pc}) {
        const auto report = check_triple(t, ws, mode);
        EXPECT_EQ(report.overall(), Truth::True);
    }
    const auto empty = check_triple(sc, {}, CheckMode::Both);
    EXPECT_TRUE(empty.vacuous());
    EXPECT_EQ(nlohmann::json::parse(report_to_json(empty, sc))["verdict"], "vacuous");
}

TEST(Triple, UnfinishedLoopsAreIndeterminate) {
    Triple t;
    t.program = corpus::load("coin.qimp");
    t.pre = DistAssn::truth(true);
    t.post = DistAssn::box(StateAssn::truth(true));
    CheckOptions opt;
    opt.denote.loop.cap = 2;
    const std::vector<Witness> ws = {{"w", POVD(ClassicalState{}, CMatrix::basis_op(t.program.dim(), 0, 0))}};
    const auto report = check_triple(t, ws, CheckMode::Semantic, opt);
    EXPECT_EQ(report.overall(), Truth::Indeterminate);
    EXPECT_THROW(check_triple(t, ws, CheckMode::Pc), PcError);
}

TEST(Triple, ParallelMatchesSerial) {
    const auto t = load_triple(corpus::path("sc.qhl"));
    WitnessOptions opt;
    opt.vars = triple_vars(t);
    opt.hi = 2;
    const auto ws = random_witnesses(40, 2, opt);
    CheckOptions serial;
    serial.policy = ExecPolicy::Serial;
    const auto a = check_triple(t, ws, CheckMode::Both, serial);
    const auto b = check_triple(t, ws, CheckMode::Both);
    ASSERT_EQ(a.verdicts.size(), b.verdicts.size());
    for (std::size_t i = 0; i < a.verdicts.size(); ++i) {
        EXPECT_EQ(a.verdicts[i].id, b.verdicts[i].id);
        EXPECT_EQ(a.verdicts[i].verdict, b.verdicts[i].verdict);
    }
    // Values outside {0, 1} break the decoding claim.
    EXPECT_EQ(a.overall(), Truth::False);
}

TEST(Witnesses, Deterministic) {
    WitnessOptions opt;
    opt.seed = 3;
    opt.vars = {"a", "b"};
    opt.lo = -1;
    opt.hi = 1;
    const auto a = random_witnesses(20, 2, opt);
    const auto b = random_witnesses(20, 2, opt);
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_TRUE(povd_eq(a[i].povd, b[i].povd, 0.0));
        EXPECT_EQ(povd_violation(a[i].povd), "");
        EXPECT_NEAR(total_mass(a[i].povd), 1.0, 1e-9);
        EXPECT_LE(a[i].povd.support_size(), 4u);
    }
    EXPECT_EQ(basis_witnesses(1, {"a", "b"}, 0, 2).size(), 9u);
}
