#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "qimp/lang.hpp"
#include "qimp/state.hpp"

namespace qimp {

// ---------------------------------------------------------------------------
// Syntax. State expressions and assertions talk about one classical state;
// distribution expressions and assertions talk about a whole POVD.

struct StateExpr;
struct StateAssn;
struct DistExpr;
struct DistAssn;
using StateExprPtr = std::shared_ptr<const StateExpr>;
using StateAssnPtr = std::shared_ptr<const StateAssn>;
using DistExprPtr = std::shared_ptr<const DistExpr>;
using DistAssnPtr = std::shared_ptr<const DistAssn>;

enum class CmpOp { Eq, Lt, Leq };

struct StateExpr {
    enum class Kind { Lit, Var, Ind, Add, Sub, Mul };
    Kind kind = Kind::Lit;
    std::int64_t value = 0;
    std::string name;
    /// Indicator condition (Ind).
    StateAssnPtr cond;
    StateExprPtr lhs, rhs;

    static StateExprPtr lit(std::int64_t v);
    static StateExprPtr var(std::string name);
    static StateExprPtr ind(StateAssnPtr psi);
    static StateExprPtr binary(Kind k, StateExprPtr l, StateExprPtr r);
};

struct StateAssn {
    enum class Kind { True, False, Cmp, Not, And, Or, Implies, Forall, Exists };
    Kind kind = Kind::True;
    CmpOp op = CmpOp::Eq;
    StateExprPtr lhs, rhs;
    StateAssnPtr a0, a1;
    /// Bound variable and inclusive range (Forall, Exists).
    std::string var;
    std::int64_t lo = 0, hi = 0;

    static StateAssnPtr truth(bool v);
    static StateAssnPtr cmp(CmpOp op, StateExprPtr l, StateExprPtr r);
    static StateAssnPtr negate(StateAssnPtr a);
    static StateAssnPtr junction(Kind k, StateAssnPtr l, StateAssnPtr r);
    static StateAssnPtr quantifier(Kind k, std::string var, std::int64_t lo, std::int64_t hi, StateAssnPtr body);
};

/// A measurement referenced by name. Names starting with '$' are generated by
/// the substitutions and are printed as declarations ahead of the assertion.
struct NamedMeasurement {
    std::string name;
    GeneralMeasurement meas;
};
using MeasurementPtr = std::shared_ptr<const NamedMeasurement>;

struct DistExpr {
    enum class Kind { Expect, MExpect, Const, Add, Sub, Scale, Trace };
    Kind kind = Kind::Expect;
    StateExprPtr body;
    /// MExpect: bound variables (one per label component), measurement and its qubits.
    std::vector<std::string> binders;
    MeasurementPtr meas;
    std::vector<std::string> qubits;
    /// Const value, or the Scale factor.
    double value = 0.0;
    DistExprPtr lhs, rhs;

    static DistExprPtr expect(StateExprPtr e);
    static DistExprPtr mexpect(std::vector<std::string> binders, MeasurementPtr m, std::vector<std::string> qubits,
                               StateExprPtr e);
    static DistExprPtr constant(double v);
    static DistExprPtr binary(Kind k, DistExprPtr l, DistExprPtr r);
    static DistExprPtr scale(double c, DistExprPtr r);
    static DistExprPtr trace(DistExprPtr r);
};

/// Characteristic assertion: satisfied exactly by one POVD.
struct CharTarget {
    POVD povd;
};

struct DistAssn {
    enum class Kind { True, False, Cmp, OPlus, Not, And, Or, Implies, Forall, Exists, Box, CharEq };
    Kind kind = Kind::True;
    CmpOp op = CmpOp::Eq;
    DistExprPtr lhs, rhs;
    DistAssnPtr p0, p1;
    /// OPlus: optional split guard. Box: the lifted state assertion.
    StateAssnPtr guard;
    std::string var;
    std::int64_t lo = 0, hi = 0;
    std::shared_ptr<const CharTarget> target;

    static DistAssnPtr truth(bool v);
    static DistAssnPtr cmp(CmpOp op, DistExprPtr l, DistExprPtr r);
    /// P1 (+) P2, split on guard when guard is non-null.
    static DistAssnPtr oplus(DistAssnPtr l, DistAssnPtr r, StateAssnPtr guard = nullptr);
    static DistAssnPtr negate(DistAssnPtr p);
    static DistAssnPtr junction(Kind k, DistAssnPtr l, DistAssnPtr r);
    static DistAssnPtr quantifier(Kind k, std::string var, std::int64_t lo, std::int64_t hi, DistAssnPtr body);
    static DistAssnPtr box(StateAssnPtr psi);
    static DistAssnPtr char_eq(POVD mu);
};

/// Program boolean expressions are state assertions.
StateAssnPtr to_state_assn(const BExp& b);
StateExprPtr to_state_expr(const AExp& a);

bool equal(const StateExpr& a, const StateExpr& b);
bool equal(const StateAssn& a, const StateAssn& b);
bool equal(const DistExpr& a, const DistExpr& b);
bool equal(const DistAssn& a, const DistAssn& b);

// ---------------------------------------------------------------------------
// Context: the quantum register and the measurements visible by name.

struct AssertionContext {
    std::vector<std::string> qubits;
    const Program* program = nullptr;

    static AssertionContext of(const Program& p) { return {p.qubits, &p}; }
    std::size_t dim() const { return dim_for_qubits(qubits.size()); }
    std::vector<std::size_t> indices(const std::vector<std::string>& qs) const;
};

/// Parses optional `meas NAME = {...};` declarations followed by one distribution assertion.
DistAssnPtr parse_assertion(std::string_view text, const AssertionContext& ctx);
StateAssnPtr parse_state_assertion(std::string_view text);

/// Declarations of every non-program measurement, then the assertion.
std::string pretty(const DistAssn& p, const AssertionContext& ctx);
/// The assertion alone, measurements by name.
std::string pretty_body(const DistAssn& p);
std::string pretty(const DistExpr& r);
std::string pretty(const StateAssn& a);
std::string pretty(const StateExpr& e);

/// Measurements referenced by p, in first-occurrence order.
std::vector<MeasurementPtr> measurements_of(const DistAssn& p);

std::set<std::string> free_vars(const StateExpr& e);
std::set<std::string> free_vars(const StateAssn& a);
std::set<std::string> free_vars(const DistAssn& p);
/// Variables bound anywhere (measurement binders and quantifiers).
std::set<std::string> bound_vars(const DistAssn& p);

// ---------------------------------------------------------------------------
// Semantics

enum class Truth { False, True, Indeterminate };
const char* to_string(Truth t);
Truth truth_and(Truth a, Truth b);
Truth truth_or(Truth a, Truth b);
Truth truth_not(Truth a);
inline Truth truth_of(bool b) { return b ? Truth::True : Truth::False; }

std::int64_t eval_state_expr(const StateExpr& e, const ClassicalState& sigma);
bool eval_state_assn(const StateAssn& a, const ClassicalState& sigma);

/// Operator-valued (a Hermitian matrix) or scalar-valued.
struct DistValue {
    bool is_operator = true;
    CMatrix op;
    double scalar = 0.0;
};

class KindError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Static kind of a distribution expression: true for operator-valued.
bool is_operator_valued(const DistExpr& r);
/// Checks every comparison and operator in p; throws KindError.
void check_kinds(const DistAssn& p);

DistValue eval_dist_expr(const DistExpr& r, const POVD& mu, const AssertionContext& ctx);

/// Three-valued satisfaction. Indeterminate only arises from a split (+) with
/// no forced decomposition that the checker could not settle.
Truth holds(const DistAssn& p, const POVD& mu, const AssertionContext& ctx);

/// mu restricted to the states satisfying psi.
POVD restrict(const POVD& mu, const StateAssn& psi);

struct BoxEquivalence {
    bool support_check = false;
    bool expectation_form = false;
    /// Same with a measurement: E_{x~M}[1_psi] = E_{x~M}[1_true].
    bool measured_form = false;
    bool agree() const { return support_check == expectation_form && expectation_form == measured_form; }
};

/// Evaluates box(psi) directly and through its two expectation encodings.
/// The measured form uses the computational measurement on the first qubit
/// with a binder that does not occur in psi.
BoxEquivalence box_equiv_check(const StateAssnPtr& psi, const POVD& mu, const AssertionContext& ctx);

}  // namespace qimp
