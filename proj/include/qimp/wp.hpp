#pragma once

#include <string>
#include <vector>

#include "qimp/assertion.hpp"
#include "qimp/densem.hpp"
#include "qimp/parallel.hpp"

namespace qimp {

// ---------------------------------------------------------------------------
// Fresh names. Generated variables are `$f<k>`, generated measurements `$m<k>`;
// '$' cannot occur in program identifiers, so they never collide.

std::string fresh_var();
std::string fresh_measurement_name();
/// Restarts both counters (tests use this for reproducible output).
void reset_fresh_names();

class SubstitutionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class CaptureMode {
    /// Alpha-rename binders that would capture.
    Rename,
    /// Refuse when x is bound anywhere in P or a binder captures a variable of a.
    Strict,
};

/// P[a/x]
DistAssnPtr subst_assign(const DistAssnPtr& p, const AExp& a, const std::string& x,
                         CaptureMode mode = CaptureMode::Rename);
DistExprPtr subst_assign(const DistExprPtr& r, const AExp& a, const std::string& x,
                         CaptureMode mode = CaptureMode::Rename);

/// Backward image of q := |0>.
DistAssnPtr subst_h(const DistAssnPtr& p, const std::string& q, const AssertionContext& ctx);
DistExprPtr subst_h(const DistExprPtr& r, const std::string& q, const AssertionContext& ctx);

/// Backward image of U[qs].
DistAssnPtr subst_g(const DistAssnPtr& p, const UnitaryGate& u, const std::vector<std::string>& qs,
                    const AssertionContext& ctx);
DistExprPtr subst_g(const DistExprPtr& r, const UnitaryGate& u, const std::vector<std::string>& qs,
                    const AssertionContext& ctx);

/// Backward image of x := M[qs].
DistAssnPtr subst_f(const DistAssnPtr& p, const std::string& x, const MeasurementPtr& m,
                    const std::vector<std::string>& qs, const AssertionContext& ctx);
DistExprPtr subst_f(const DistExprPtr& r, const std::string& x, const MeasurementPtr& m,
                    const std::vector<std::string>& qs, const AssertionContext& ctx);

// ---------------------------------------------------------------------------
// Precondition calculus for loop-free commands.

class PcError : public std::invalid_argument {
public:
    PcError(const std::string& msg, SourceLoc loc)
        : std::invalid_argument(std::to_string(loc.line) + ":" + std::to_string(loc.column) + ": " + msg), loc_(loc) {}
    SourceLoc loc() const noexcept { return loc_; }

private:
    SourceLoc loc_;
};

DistAssnPtr pc(const Program& prog, const Com& c, const DistAssnPtr& post);
inline DistAssnPtr pc(const Program& prog, const DistAssnPtr& post) { return pc(prog, *prog.body, post); }

/// Drops operators whose entries are all below tol; throws std::logic_error if
/// the remainder is no longer complete.
GeneralMeasurement simplify_measurement(const GeneralMeasurement& m, double tol = kEpsNum);
/// Simplifies every generated measurement ('$' names) referenced by p.
DistAssnPtr simplify_measurements(const DistAssnPtr& p, double tol = kEpsNum);

// ---------------------------------------------------------------------------
// Triples and the witness-based checker.

struct Triple {
    DistAssnPtr pre;
    Program program;
    DistAssnPtr post;
    /// Location of the program file, as written in the triple file.
    std::string program_path;
};

/// Triple file: sections `pre:`, `prog:` and `post:`, each running until the
/// next section header. The program path is resolved against base_dir.
Triple parse_triple(std::string_view text, const std::string& base_dir);
Triple load_triple(const std::string& path);

enum class CheckMode { Semantic, Pc, Both };
const char* to_string(CheckMode m);

struct Witness {
    std::string id;
    POVD povd;
};

struct WitnessVerdict {
    std::string id;
    Truth verdict = Truth::Indeterminate;
    Truth pre = Truth::Indeterminate;
    /// Semantic: the postcondition on the output. Pc: the precondition calculus at the witness.
    std::optional<Truth> semantic;
    std::optional<Truth> pc;
    std::string details;
    /// Output of the command, kept for failing semantic checks.
    std::optional<POVD> output;
};

struct CheckReport {
    CheckMode mode = CheckMode::Semantic;
    std::vector<WitnessVerdict> verdicts;
    /// The precondition computed in pc mode.
    DistAssnPtr precondition;

    bool vacuous() const { return verdicts.empty(); }
    Truth overall() const;
    std::size_t count(Truth t) const;
};

struct CheckOptions {
    DenoteOptions denote;
    ExecPolicy policy = ExecPolicy::Parallel;
};

CheckReport check_triple(const Triple& t, const std::vector<Witness>& witnesses, CheckMode mode,
                         const CheckOptions& opt = {});

std::string report_to_json(const CheckReport& r, const Triple& t, int indent = 2);

}  // namespace qimp
