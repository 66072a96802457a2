#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qimp/qmath.hpp"

namespace qimp {

struct SourceLoc {
    int line = 0;
    int column = 0;
};

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& msg, SourceLoc loc)
        : std::runtime_error(std::to_string(loc.line) + ":" + std::to_string(loc.column) + ": " + msg),
          loc_(loc) {}
    SourceLoc loc() const noexcept { return loc_; }

private:
    SourceLoc loc_;
};

// ---------------------------------------------------------------------------
// Arithmetic and boolean expressions. Nodes are immutable and shared.

struct AExp;
struct BExp;
struct Com;
using AExpPtr = std::shared_ptr<const AExp>;
using BExpPtr = std::shared_ptr<const BExp>;
using ComPtr = std::shared_ptr<const Com>;

struct AExp {
    enum class Kind { Lit, Var, Add, Sub, Mul };
    Kind kind = Kind::Lit;
    std::int64_t value = 0;
    std::string name;
    AExpPtr lhs, rhs;

    static AExpPtr lit(std::int64_t v);
    static AExpPtr var(std::string name);
    static AExpPtr binary(Kind k, AExpPtr l, AExpPtr r);
};

struct BExp {
    enum class Kind { True, False, Eq, Leq, Not, And, Or };
    Kind kind = Kind::True;
    AExpPtr a0, a1;
    BExpPtr b0, b1;

    static BExpPtr truth(bool v);
    static BExpPtr cmp(Kind k, AExpPtr l, AExpPtr r);
    static BExpPtr negate(BExpPtr b);
    static BExpPtr junction(Kind k, BExpPtr l, BExpPtr r);
};

struct Com {
    enum class Kind { Skip, Abort, Assign, Seq, If, While, QInit, QUnit, QMeas, Nil };
    Kind kind = Kind::Skip;
    /// Assigned classical variable (Assign, QMeas) or initialised qubit (QInit).
    std::string var;
    AExpPtr expr;
    BExpPtr cond;
    ComPtr first, second;
    /// Gate or measurement name (QUnit, QMeas).
    std::string op;
    std::vector<std::string> qubits;
    SourceLoc loc;

    static ComPtr skip(SourceLoc loc = {});
    static ComPtr abort(SourceLoc loc = {});
    static ComPtr nil();
    static ComPtr assign(std::string x, AExpPtr a, SourceLoc loc = {});
    static ComPtr seq(ComPtr c0, ComPtr c1);
    static ComPtr if_(BExpPtr b, ComPtr c0, ComPtr c1, SourceLoc loc = {});
    static ComPtr while_(BExpPtr b, ComPtr body, SourceLoc loc = {});
    static ComPtr qinit(std::string q, SourceLoc loc = {});
    static ComPtr qunit(std::string gate, std::vector<std::string> qs, SourceLoc loc = {});
    static ComPtr qmeas(std::string x, std::string meas, std::vector<std::string> qs, SourceLoc loc = {});
};

bool equal(const AExp& a, const AExp& b);
bool equal(const BExp& a, const BExp& b);
/// Structural equality; source locations are ignored.
bool equal(const Com& a, const Com& b);

/// Folds a list of commands into a right-nested Seq chain.
ComPtr seq_chain(const std::vector<ComPtr>& cs);

// ---------------------------------------------------------------------------
// Programs

enum class DeclKind { Gate, Measurement };

struct Program {
    std::vector<std::string> qubits;
    std::map<std::string, UnitaryGate> gates;
    std::map<std::string, GeneralMeasurement> measurements;
    /// User declarations in source order (builtins excluded).
    std::vector<std::pair<DeclKind, std::string>> declarations;
    ComPtr body;

    std::size_t qubit_count() const noexcept { return qubits.size(); }
    std::size_t dim() const noexcept { return dim_for_qubits(qubits.size()); }
    /// Position of a declared qubit; throws std::out_of_range.
    std::size_t qubit_index(std::string_view q) const;
    std::vector<std::size_t> qubit_indices(const std::vector<std::string>& qs) const;

    /// Gate / measurement lookup including builtins.
    const UnitaryGate* find_gate(std::string_view name) const;
    const GeneralMeasurement* find_measurement(std::string_view name) const;
};

/// Builtin gates: H, X, Z, I, CNOT. Builtin measurement: M (computational basis).
const std::map<std::string, UnitaryGate>& builtin_gates();
const std::map<std::string, GeneralMeasurement>& builtin_measurements();

/// Checks the Program invariants (declared qubits, resolvable names, arities).
/// Throws ParseError at the offending command's location.
void validate(const Program& p);

Program parse_program(std::string_view text);
std::string pretty(const Program& p);
std::string pretty(const Com& c);
std::string pretty(const AExp& a);
std::string pretty(const BExp& b);

bool equal(const Program& a, const Program& b);

std::set<std::string> classical_vars(const Program& p);
std::set<std::string> classical_vars(const Com& c);
void free_vars(const AExp& a, std::set<std::string>& out);
void free_vars(const BExp& b, std::set<std::string>& out);
std::vector<std::string> quantum_vars(const Program& p);

bool is_loop_free(const Com& c);

}  // namespace qimp
