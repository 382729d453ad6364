#include <benchmark/benchmark.h>

#include <occ/coupling.hpp>
#include <occ/exact_pmf.hpp>
#include <occ/rng.hpp>

namespace {

void BM_SampleMultinomial(benchmark::State& state) {
    const long long n = state.range(0), m = state.range(1);
    auto gen = occ::substream(1, 0);
    for (auto _ : state)
        benchmark::DoNotOptimize(occ::sample_multinomial(n, m, gen));
}
BENCHMARK(BM_SampleMultinomial)->Args({40, 20})->Args({400, 200})->Args({4000, 2000});

void BM_SampleCoupled(benchmark::State& state) {
    const occ::OccupancyParams params{state.range(0), state.range(1), 2};
    auto gen = occ::substream(1, 0);
    for (auto _ : state)
        benchmark::DoNotOptimize(occ::sample_coupled(params, gen));
}
BENCHMARK(BM_SampleCoupled)->Args({10, 5})->Args({100, 50})->Args({1000, 500});

void BM_FloatPmf(benchmark::State& state) {
    const occ::OccupancyParams params{state.range(0), state.range(1), 2};
    for (auto _ : state)
        benchmark::DoNotOptimize(occ::float_pmf(params));
}
BENCHMARK(BM_FloatPmf)->Args({40, 20})->Args({150, 150})->Args({300, 150});

void BM_ExactPmf(benchmark::State& state) {
    const occ::OccupancyParams params{state.range(0), state.range(1), 2};
    for (auto _ : state)
        benchmark::DoNotOptimize(occ::exact_pmf(params));
}
BENCHMARK(BM_ExactPmf)->Args({20, 10})->Args({60, 30});

void BM_CondExpectationDiff(benchmark::State& state) {
    const occ::OccupancyParams params{state.range(0), state.range(1), 2};
    auto gen = occ::substream(1, 0);
    const auto cfg = occ::sample_multinomial(params.n, params.m, gen);
    for (auto _ : state)
        benchmark::DoNotOptimize(occ::cond_expectation_diff(cfg, params));
}
BENCHMARK(BM_CondExpectationDiff)->Args({40, 20})->Args({400, 200})->Args({4000, 2000});

}  // namespace

BENCHMARK_MAIN();
