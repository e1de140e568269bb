#include <benchmark/benchmark.h>

#include <random>

#include "ipsc/mdct.hpp"

using namespace ipsc;

namespace {

AudioSignal make_signal(std::size_t n) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-0.5, 0.5);
    AudioSignal s;
    s.samples.resize(n);
    for (auto& v : s.samples) v = dist(rng);
    return s;
}

void BM_analyze(benchmark::State& state) {
    auto s = make_signal(static_cast<std::size_t>(state.range(0)) * kStride);
    for (auto _ : state) {
        auto spec = mdct().analyze(s);
        benchmark::DoNotOptimize(spec.coeffs.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_synthesize(benchmark::State& state) {
    auto s = make_signal(static_cast<std::size_t>(state.range(0)) * kStride);
    auto spec = mdct().analyze(s);
    for (auto _ : state) {
        auto back = mdct().synthesize(spec);
        benchmark::DoNotOptimize(back.samples.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_analyze)->Arg(10)->Arg(50)->Arg(500);
BENCHMARK(BM_synthesize)->Arg(10)->Arg(50)->Arg(500);

BENCHMARK_MAIN();
