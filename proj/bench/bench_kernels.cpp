// Serial vs OpenMP-parallel variants of the per-sequence and per-row kernels.

#include <benchmark/benchmark.h>

#include <random>

#include "evbranch/badmm.hpp"
#include "evbranch/em.hpp"
#include "evbranch/simulator.hpp"

using namespace evbranch;

namespace {

HawkesParams params() {
    Matrix A(2, 2);
    A << 0.3, 0.2, 0.2, 0.3;
    return HawkesParams((Vector(2) << 0.5, 0.3).finished(), A);
}

const Dataset& dataset() {
    static const Dataset d = simulate_dataset(params(), {100.0, 1, 100000}, 200).sequences;
    return d;
}

TransitionMatrix random_prior(Eigen::Index n) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.01, 1.0);
    Matrix m = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) m(i, j) = U(rng);
        m.row(i) /= m.row(i).sum();
    }
    return TransitionMatrix(std::move(m));
}

Exec mode(const benchmark::State& state) { return state.range(0) ? Exec::parallel : Exec::serial; }

void BM_EStep(benchmark::State& state) {
    const auto p = params();
    for (auto _ : state) benchmark::DoNotOptimize(e_step(p, dataset(), mode(state)));
}

void BM_LogLikelihood(benchmark::State& state) {
    const auto p = params();
    for (auto _ : state) benchmark::DoNotOptimize(log_likelihood(p, dataset(), mode(state)));
}

void BM_BUpdate(benchmark::State& state) {
    const auto B0 = random_prior(400);
    const Matrix Z = Matrix::Zero(400, 400);
    for (auto _ : state)
        benchmark::DoNotOptimize(b_update(B0, B0.entries(), B0.entries(), Z, Z, 1.0, 1e-12, mode(state)));
}

void BM_Simulate(benchmark::State& state) {
    const auto p = params();
    for (auto _ : state)
        benchmark::DoNotOptimize(simulate_dataset(p, {100.0, 3, 100000}, 100, SimMethod::branching, mode(state)));
}

}  // namespace

BENCHMARK(BM_EStep)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LogLikelihood)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BUpdate)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Simulate)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
