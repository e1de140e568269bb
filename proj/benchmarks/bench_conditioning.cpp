#include <benchmark/benchmark.h>

#include <random>

#include "ipsc/codec.hpp"
#include "ipsc/conditioning.hpp"
#include "ipsc/prior.hpp"

using namespace ipsc;

namespace {

// One full measurement-score evaluation: the inner loop of Langevin decoding.
void BM_measurement_score(benchmark::State& state) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> dist(0.0, 0.2);
    AudioSignal clip;
    clip.samples.resize(30 * kStride);
    for (auto& v : clip.samples) v = dist(rng);
    auto enc = encode(clip, 16.0);
    const std::size_t n = Mdct::signal_length(enc.measurement.frames);
    GaussianProcessPrior prior(n, 0.9, 0.04);
    ConditioningConfig cfg;
    std::vector<double> x(n);
    for (auto& v : x) v = dist(rng);
    double sigma = std::pow(10.0, state.range(0) / 20.0);
    for (auto _ : state) {
        auto s = measurement_score(x, enc.measurement, sigma, prior, cfg);
        benchmark::DoNotOptimize(s.data());
    }
}

}  // namespace

// The argument is sigma^2 in dB: early, mid, and late annealing.
BENCHMARK(BM_measurement_score)->Arg(0)->Arg(-30)->Arg(-60)->Arg(-90);

BENCHMARK_MAIN();
