#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "qimp/lang.hpp"
#include "qimp/qmath.hpp"

namespace qimp {

/// Entries whose trace falls below this are dropped from a POVD.
inline constexpr double kEpsPrune = 1e-12;

/// Total map from classical variables to integers; absent names read as 0.
/// The canonical form stores no zero entries, so equality and ordering are
/// decidable and stable.
class ClassicalState {
public:
    ClassicalState() = default;
    ClassicalState(std::initializer_list<std::pair<const std::string, std::int64_t>> init);

    std::int64_t operator[](std::string_view name) const;
    const std::map<std::string, std::int64_t, std::less<>>& assignments() const noexcept { return vals_; }

    /// sigma[n/x]
    ClassicalState updated(std::string_view x, std::int64_t n) const;
    /// Simultaneous update of several names (used for tuple labels).
    ClassicalState updated(const std::vector<std::string>& xs, const Label& ns) const;

    /// Sorted "name=value" serialization over nonzero entries.
    std::string fingerprint() const;

    friend bool operator==(const ClassicalState&, const ClassicalState&) = default;
    friend auto operator<=>(const ClassicalState& a, const ClassicalState& b) { return a.vals_ <=> b.vals_; }

private:
    std::map<std::string, std::int64_t, std::less<>> vals_;
};

inline ClassicalState update(const ClassicalState& sigma, std::string_view x, std::int64_t n) {
    return sigma.updated(x, n);
}

class MassError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Partial-density-operator valued distribution: a finite map from classical
/// states to partial density operators with total trace at most 1.
class POVD {
public:
    using Entries = std::map<ClassicalState, CMatrix>;

    explicit POVD(std::size_t dim = 1) : dim_(dim) {}
    /// Single machine state (sigma, rho).
    POVD(ClassicalState sigma, CMatrix rho);

    std::size_t dim() const noexcept { return dim_; }
    const Entries& entries() const noexcept { return entries_; }
    bool empty() const noexcept { return entries_.empty(); }
    std::size_t support_size() const noexcept { return entries_.size(); }

    /// mu(sigma); the zero matrix outside the support.
    CMatrix at(const ClassicalState& sigma) const;
    bool contains(const ClassicalState& sigma) const { return entries_.count(sigma) != 0; }

    /// Adds rho at sigma; drops the entry if its trace ends below kEpsPrune.
    /// Does not check the mass bound (see validate_povd).
    void accumulate(const ClassicalState& sigma, const CMatrix& rho);

    POVD& operator+=(const POVD& o);

private:
    std::size_t dim_;
    Entries entries_;
};

/// The empty POVD (epsilon) of the given dimension.
inline POVD empty_povd(std::size_t dim) { return POVD(dim); }

/// Pointwise sum; throws DimensionError on dim mismatch and MassError if the
/// result exceeds total mass 1 + kEpsNum.
POVD povd_add(const POVD& a, const POVD& b);

/// mu|b: keeps exactly the entries whose classical state satisfies b.
POVD restrict(const POVD& mu, const BExp& b);

double total_mass(const POVD& mu);

/// Same support (after pruning) and entrywise max-norm within tol per state.
bool povd_eq(const POVD& a, const POVD& b, double tol = kEpsNum);

/// Summed per-state max-norm distance over the union of supports.
double povd_distance(const POVD& a, const POVD& b);

/// Empty string when mu satisfies the POVD invariants, otherwise the reason.
std::string povd_violation(const POVD& mu, double tol = kEpsNum);

/// mu1 <= mu2 pointwise in the Loewner order.
bool povd_leq(const POVD& a, const POVD& b, double tol = kEpsNum);

struct Configuration {
    ComPtr command;
    ClassicalState sigma;
    CMatrix rho;
};

// --- JSON interchange ---
// { "qubits": ["q0","q1"], "entries": [ { "cstate": {"x0":1}, "rho": "<matrix literal>" } ] }

struct LoadedPOVD {
    std::vector<std::string> qubits;
    POVD povd;
};

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses and validates a POVD document; throws FormatError.
LoadedPOVD povd_from_json(std::string_view text);
/// Serializes with round-trip precision.
std::string povd_to_json(const POVD& mu, const std::vector<std::string>& qubits, int indent = 2);

}  // namespace qimp
