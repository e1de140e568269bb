#include <benchmark/benchmark.h>

#include <random>

#include "ipsc/codec.hpp"

using namespace ipsc;

namespace {

AudioSignal noise_signal(double seconds) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> dist(0.0, 0.15);
    AudioSignal s;
    auto n = static_cast<std::size_t>(seconds * kSampleRate) / kStride * kStride;
    s.samples.resize(n);
    for (auto& v : s.samples) v = dist(rng);
    return s;
}

void BM_encode(benchmark::State& state) {
    auto s = noise_signal(2.0);
    double kbps = static_cast<double>(state.range(0));
    for (auto _ : state) {
        auto enc = encode(s, kbps);
        benchmark::DoNotOptimize(enc.bytes.data());
    }
    state.SetItemsProcessed(state.iterations() * s.samples.size());
}

void BM_decode_legacy(benchmark::State& state) {
    auto s = noise_signal(2.0);
    auto enc = encode(s, static_cast<double>(state.range(0)));
    for (auto _ : state) {
        auto out = decode_legacy(enc.bytes, 1);
        benchmark::DoNotOptimize(out.samples.data());
    }
    state.SetItemsProcessed(state.iterations() * s.samples.size());
}

}  // namespace

BENCHMARK(BM_encode)->Arg(8)->Arg(16)->Arg(48);
BENCHMARK(BM_decode_legacy)->Arg(8)->Arg(48);

BENCHMARK_MAIN();
