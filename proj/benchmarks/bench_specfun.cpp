#include <benchmark/benchmark.h>

#include <cmath>

#include "ipsc/specfun.hpp"

using namespace ipsc::specfun;

namespace {

void BM_q_gauss_inside(benchmark::State& state) {
    double x = 0.01;
    for (auto _ : state) {
        benchmark::DoNotOptimize(q_gauss(x, -0.05, 0.05, 0.02));
    }
}

void BM_q_gauss_tail(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(q_gauss(1.0, -0.05, 0.05, 0.02));
    }
}

void BM_q_ncx2(benchmark::State& state) {
    double lambda = static_cast<double>(state.range(0));
    double mean = 8.0 + lambda;
    for (auto _ : state) {
        benchmark::DoNotOptimize(q_ncx2(lambda, 0.9 * mean, 1.1 * mean, 8));
    }
}

void BM_ncx2_log_sf(benchmark::State& state) {
    double lambda = static_cast<double>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(ncx2_log_sf(1.2 * (8.0 + lambda), 8, lambda));
    }
}

}  // namespace

BENCHMARK(BM_q_gauss_inside);
BENCHMARK(BM_q_gauss_tail);
BENCHMARK(BM_q_ncx2)->Arg(1)->Arg(100)->Arg(900)->Arg(100000)->Arg(100000000);
BENCHMARK(BM_ncx2_log_sf)->Arg(1)->Arg(100)->Arg(900)->Arg(100000);

BENCHMARK_MAIN();
