#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qimp/wp.hpp"

namespace qimp {

struct WitnessOptions {
    std::uint64_t seed = 1;
    /// Classical variables that receive random values in [lo, hi].
    std::vector<std::string> vars;
    std::int64_t lo = 0;
    std::int64_t hi = 1;
    /// Number of classical states mixed per witness, at most.
    int max_states = 4;
    /// Total mass; 1 gives full-trace witnesses.
    double mass = 1.0;
};

/// Random POVDs: each mixes up to max_states classical states, each paired
/// with a pure state from a normalised complex Gaussian vector. Seeded, so
/// the same options give the same witnesses.
std::vector<Witness> random_witnesses(std::size_t count, std::size_t qubits, const WitnessOptions& opt);

/// One witness per assignment of vars over [lo, hi], each with the all-zero
/// quantum state and mass 1.
std::vector<Witness> basis_witnesses(std::size_t qubits, const std::vector<std::string>& vars, std::int64_t lo,
                                     std::int64_t hi);

/// Classical variables a triple talks about: the program's and the free
/// variables of both assertions, generated names excluded.
std::vector<std::string> triple_vars(const Triple& t);

}  // namespace qimp
