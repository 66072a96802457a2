#pragma once

#include <cstdint>

#include "qimp/lang.hpp"
#include "qimp/parallel.hpp"
#include "qimp/state.hpp"

namespace qimp {

struct LoopOptions {
    std::int64_t cap = 10'000;
    /// A loop has converged once the mass still inside it drops below tol.
    double tol = 1e-9;
};

struct DenoteOptions {
    LoopOptions loop;
    ExecPolicy policy = ExecPolicy::Parallel;
};

struct Denotation {
    POVD result;
    /// False if any loop evaluation hit the iteration cap.
    bool converged = true;
    /// Largest iteration count of any single loop evaluation.
    std::int64_t iterations = 0;
    /// Mass left inside loops that hit the cap.
    double residual_mass = 0.0;
};

/// Lifted semantics: the sum over the support of mu of the single-state semantics.
/// Throws OverflowError; loop non-convergence is reported, not thrown.
Denotation denote(const Program& prog, const Com& c, const POVD& mu, const DenoteOptions& opt = {});
Denotation denote(const Program& prog, const POVD& mu, const DenoteOptions& opt = {});

/// Semantics from the single machine state (sigma, rho).
Denotation denote_state(const Program& prog, const Com& c, const ClassicalState& sigma, const CMatrix& rho,
                        const DenoteOptions& opt = {});

struct WhileResult {
    POVD result;
    bool converged = true;
    std::int64_t iterations = 0;
    double residual_mass = 0.0;
};

/// Iterates the body on the mass still satisfying b, summing what leaves. Stops
/// when the live mass is below tol, when the live POVD repeats (mass trapped
/// forever), or at cap.
WhileResult denote_while(const Program& prog, const BExp& b, const Com& body, const POVD& mu,
                         const LoopOptions& opt = {});

/// The n-th lower approximation: the loop cut off after n iterations of the body,
/// with whatever still satisfies b discarded.
POVD while_approximant(const Program& prog, const BExp& b, const Com& body, const POVD& mu, std::int64_t n);

}  // namespace qimp
