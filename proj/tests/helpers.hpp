#pragma once

// Shared test utilities: signal generators and brute-force oracles kept
// independent of the library's fast paths.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "ipsc/audio.hpp"
#include "ipsc/mdct.hpp"

namespace testutil {

inline ipsc::AudioSignal random_signal(std::size_t n, std::uint64_t seed, double amp = 0.5) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-amp, amp);
    ipsc::AudioSignal s;
    s.samples.resize(n);
    for (auto& v : s.samples) v = dist(rng);
    return s;
}

inline ipsc::AudioSignal sine_signal(double hz, double seconds, double amp = 0.5) {
    ipsc::AudioSignal s;
    auto n = static_cast<std::size_t>(seconds * ipsc::kSampleRate);
    n = (n / ipsc::kStride) * ipsc::kStride;
    s.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        s.samples[i] = amp * std::sin(2.0 * M_PI * hz * i / ipsc::kSampleRate);
    }
    return s;
}

/// AR(1) process with marginal variance var and coefficient rho.
inline ipsc::AudioSignal ar1_signal(std::size_t n, double rho, double var, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> norm(0.0, 1.0);
    ipsc::AudioSignal s;
    s.samples.resize(n);
    double sd = std::sqrt(var);
    double x = sd * norm(rng);
    double innov = sd * std::sqrt(1.0 - rho * rho);
    for (std::size_t i = 0; i < n; ++i) {
        s.samples[i] = x;
        x = rho * x + innov * norm(rng);
    }
    return s;
}

/// Direct O(L^2) MDCT of one 2L-sample block: sine window, orthonormal scale.
inline std::vector<double> dense_mdct_frame(const double* block) {
    constexpr int L = ipsc::kStride;
    std::vector<double> out(L, 0.0);
    for (int k = 0; k < L; ++k) {
        double acc = 0.0;
        for (int n = 0; n < 2 * L; ++n) {
            double w = std::sin(M_PI * (n + 0.5) / (2.0 * L));
            acc += w * block[n] * std::cos(M_PI / L * (n + 0.5 + L / 2.0) * (k + 0.5));
        }
        out[k] = std::sqrt(2.0 / L) * acc;
    }
    return out;
}

/// Dense-matrix analysis of a whole signal (zero-padded one stride each side).
inline std::vector<double> dense_mdct_analyze(const ipsc::AudioSignal& s) {
    constexpr int L = ipsc::kStride;
    const std::size_t n = s.samples.size();
    const std::size_t frames = n / L + 1;
    std::vector<double> padded(n + 2 * L, 0.0);
    std::copy(s.samples.begin(), s.samples.end(), padded.begin() + L);
    std::vector<double> coeffs;
    coeffs.reserve(frames * L);
    for (std::size_t m = 0; m < frames; ++m) {
        auto row = dense_mdct_frame(padded.data() + m * L);
        coeffs.insert(coeffs.end(), row.begin(), row.end());
    }
    return coeffs;
}

/// Dense-matrix synthesis (adjoint of dense_mdct_analyze).
inline std::vector<double> dense_mdct_synthesize(const std::vector<double>& coeffs,
                                                 std::size_t frames) {
    constexpr int L = ipsc::kStride;
    const std::size_t n = (frames - 1) * L;
    std::vector<double> padded(n + 2 * L, 0.0);
    for (std::size_t m = 0; m < frames; ++m) {
        const double* row = coeffs.data() + m * L;
        for (int i = 0; i < 2 * L; ++i) {
            double w = std::sin(M_PI * (i + 0.5) / (2.0 * L));
            double acc = 0.0;
            for (int k = 0; k < L; ++k) {
                acc += row[k] * std::cos(M_PI / L * (i + 0.5 + L / 2.0) * (k + 0.5));
            }
            padded[m * L + i] += std::sqrt(2.0 / L) * w * acc;
        }
    }
    return {padded.begin() + L, padded.begin() + L + n};
}

inline double energy(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return acc;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace testutil
