// Serial reference loops against the OpenMP kernels. Arg 0 runs
// Exec::serial(), any other arg is the worker cap.

#include <benchmark/benchmark.h>

#include "ckn/experiments.hpp"
#include "ckn/manifold.hpp"
#include "ckn/vectorineq.hpp"

using namespace ckn;

namespace {

Exec exec_for(const benchmark::State& state)
{
    return state.range(0) == 0 ? Exec::serial() : Exec::threads(static_cast<int>(state.range(0)));
}

void BM_EstimateCp(benchmark::State& state)
{
    const Exec ex = exec_for(state);
    for (auto _ : state)
        benchmark::DoNotOptimize(estimate_cp(1.5, 20000, 42, ex).value);
}

void BM_VectorScan(benchmark::State& state)
{
    const Exec ex = exec_for(state);
    const std::vector<double> gammas{0.25, 0.5, 1.0};
    for (auto _ : state)
        benchmark::DoNotOptimize(scan_vector_inequalities(3.0, gammas, 0.5, 50000, 42, ex));
}

void BM_LemmaScan(benchmark::State& state)
{
    const Exec ex = exec_for(state);
    for (auto _ : state)
        benchmark::DoNotOptimize(scan_lemma_a(50000, 42, ex));
}

void BM_VerifyIdentities(benchmark::State& state)
{
    const Exec ex = exec_for(state);
    const Corpus corpus = build_default_corpus({CknParams::make(3, 1.5, 4.0 / 3.0, 2.0 / 3.0),
                                                CknParams::make(3, 2.0, 0.0, 0.0), CknParams::make(5, 2.5, 1.0, 0.5)},
                                               42);
    const QuadratureScheme s;
    for (auto _ : state)
        benchmark::DoNotOptimize(verify_identities(corpus, s, ex).max_residual);
}

void BM_ProjectFreeLam(benchmark::State& state)
{
    ProjectionConfig cfg;
    cfg.exec = exec_for(state);
    const CknParams q = CknParams::make(4, 2.0, 1.0, 2.0 / 3.0);
    const RadialProfile u = unit_bump(0.5, 3.0);
    const QuadratureScheme s;
    for (auto _ : state)
        benchmark::DoNotOptimize(project(u, q, StabilityVariant::ThmCDist, s, cfg).distance);
}

} // namespace

BENCHMARK(BM_EstimateCp)->Arg(0)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VectorScan)->Arg(0)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LemmaScan)->Arg(0)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_VerifyIdentities)->Arg(0)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ProjectFreeLam)->Arg(0)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
