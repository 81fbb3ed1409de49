#include <benchmark/benchmark.h>

#include "safebai/config.hpp"
#include "safebai/replicate.hpp"

using namespace safebai;

namespace {

ExperimentConfig bench_config(int replications) {
    ExperimentConfig c;
    c.replications = replications;
    c.master_seed = 1;
    c.algo.variant = Variant::lingape;
    return c;
}

void BM_Serial(benchmark::State& state) {
    const ExperimentConfig c = bench_config(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(run_replications_serial(c));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Parallel(benchmark::State& state) {
    const ExperimentConfig c = bench_config(static_cast<int>(state.range(0)));
    const int workers = static_cast<int>(state.range(1));
    for (auto _ : state) benchmark::DoNotOptimize(run_replications_parallel(c, workers));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_Serial)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Parallel)->Args({16, 1})->Args({16, 2})->Args({16, 4})->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
