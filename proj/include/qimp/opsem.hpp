#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "qimp/lang.hpp"
#include "qimp/parallel.hpp"
#include "qimp/state.hpp"

namespace qimp {

class OverflowError : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

/// Big-step evaluation; unassigned variables read as 0. Throws OverflowError.
std::int64_t eval_aexp(const AExp& a, const ClassicalState& sigma);
bool eval_bexp(const BExp& b, const ClassicalState& sigma);

/// One reduction of the expression relation, or nullopt for a value.
std::optional<AExpPtr> reduce_once(const AExpPtr& a, const ClassicalState& sigma);
std::optional<BExpPtr> reduce_once(const BExpPtr& b, const ClassicalState& sigma);

/// Every intermediate expression from a to its value, printed, a included.
std::vector<std::string> reduction_chain(const AExpPtr& a, const ClassicalState& sigma);
std::vector<std::string> reduction_chain(const BExpPtr& b, const ClassicalState& sigma);

/// Embedded operators of the quantum commands of one program, keyed by node.
class OperatorCache {
public:
    OperatorCache(const Program& prog, const Com& root);
    /// Kraus-style operators applied by a QInit / QUnit / QMeas node.
    const std::vector<CMatrix>& operators(const Program& prog, const Com& c) const;
    /// nullptr when c was not reachable from the root.
    const std::vector<CMatrix>* find(const Com& c) const;

private:
    std::unordered_map<const Com*, std::vector<CMatrix>> ops_;
};

/// Operators of a single quantum command lifted to the full register.
std::vector<CMatrix> lifted_operators(const Program& prog, const Com& c);

struct StepResult {
    std::vector<Configuration> successors;
};

/// One transition. Measurements yield one successor per operator (unpruned);
/// abort has no transition and yields none. Throws std::logic_error on Nil.
StepResult step(const Configuration& cfg, const Program& prog, const OperatorCache* cache = nullptr);

struct TraceNode {
    std::string command;
    ClassicalState sigma;
    CMatrix rho;
    /// Expression reductions performed by the step out of this node.
    std::vector<std::string> expr_steps;
    std::vector<TraceNode> children;
};

struct RunOptions {
    /// Number of breadth-first layers; every live configuration takes one step per layer.
    std::int64_t fuel = 1'000'000;
    bool record_trace = false;
    ExecPolicy policy = ExecPolicy::Parallel;
};

struct RunResult {
    POVD terminal;
    double residual_mass = 0.0;
    std::int64_t layers = 0;
    std::size_t max_frontier = 0;
    /// One root per support entry of the initial POVD.
    std::vector<TraceNode> trace;
};

/// Breadth-first exhaustive execution of prog.body from every support entry of init.
RunResult run(const Program& prog, const POVD& init, const RunOptions& opt = {});
RunResult run(const Program& prog, const ComPtr& body, const POVD& init, const RunOptions& opt = {});

std::string trace_to_json(const std::vector<TraceNode>& roots, int indent = 2);

}  // namespace qimp
