#pragma once

namespace qimp {

/// Serial keeps a single-threaded reference path alive for testing; Parallel
/// spreads independent branches or support entries over OpenMP threads.
/// Both produce identical results.
enum class ExecPolicy { Serial, Parallel };

}  // namespace qimp
