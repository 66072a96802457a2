// Serial against OpenMP kernels on branching workloads.

#include <benchmark/benchmark.h>

#include <string>

#include "qimp/densem.hpp"
#include "qimp/opsem.hpp"
#include "qimp/witness.hpp"
#include "qimp/wp.hpp"

using namespace qimp;

namespace {

/// Four qubits, three rounds of measuring all of them: 4096 classical branches.
const Program& branching_program() {
    static const Program p = [] {
        std::string body;
        for (int round = 0; round < 3; ++round) {
            body += "H[q0]; H[q1]; CNOT[q1, q2]; H[q3]; H[q2];\n";
            body += "a := M[q0]; b := M[q1]; c := M[q2]; d := M[q3];\n";
            body += "s := s * 16 + a * 8 + b * 4 + c * 2 + d;\n";
        }
        body += "skip";
        return parse_program("qubits q0, q1, q2, q3;\nmain {\n" + body + "\n}");
    }();
    return p;
}

POVD wide_input(std::size_t entries) {
    const auto& p = branching_program();
    POVD mu(p.dim());
    const double w = 1.0 / static_cast<double>(entries);
    for (std::size_t k = 0; k < entries; ++k)
        mu.accumulate(ClassicalState{}.updated("t", static_cast<std::int64_t>(k + 1)),
                      Complex(w) * CMatrix::basis_op(p.dim(), k % p.dim(), k % p.dim()));
    return mu;
}

ExecPolicy policy_of(const benchmark::State& state) {
    return state.range(0) == 0 ? ExecPolicy::Serial : ExecPolicy::Parallel;
}

void BM_Run(benchmark::State& state) {
    const auto& p = branching_program();
    const auto mu = wide_input(4);
    RunOptions opt;
    opt.policy = policy_of(state);
    for (auto _ : state) benchmark::DoNotOptimize(run(p, mu, opt));
}

void BM_Denote(benchmark::State& state) {
    const auto& p = branching_program();
    const auto mu = wide_input(8);
    DenoteOptions opt;
    opt.policy = policy_of(state);
    for (auto _ : state) benchmark::DoNotOptimize(denote(p, mu, opt));
}

void BM_CheckTriple(benchmark::State& state) {
    const auto t = load_triple(std::string(QIMP_SOURCE_DIR) + "/programs/sc.qhl");
    WitnessOptions wopt;
    wopt.seed = 1;
    wopt.vars = triple_vars(t);
    const auto ws = random_witnesses(200, 2, wopt);
    CheckOptions opt;
    opt.policy = policy_of(state);
    opt.denote.policy = opt.policy;
    for (auto _ : state) benchmark::DoNotOptimize(check_triple(t, ws, CheckMode::Both, opt));
}

}  // namespace

BENCHMARK(BM_Run)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Denote)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CheckTriple)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
