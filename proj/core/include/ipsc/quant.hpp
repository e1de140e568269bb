#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ipsc/band_layout.hpp"
#include "ipsc/mdct.hpp"

namespace ipsc {

// Envelope grid: 3 dB steps anchored at 0 dB, with a reserved silent index
// for band energies below the -96 dB floor.
inline constexpr double kEnvStepDb = 3.0;
inline constexpr double kEnvFloorDb = -96.0;
inline constexpr std::int32_t kSilentEnvIndex = -33;  // one below the lowest regular index

// Allocation levels step the line quantizer in 1.5 dB increments;
// level 0 gives delta = env_mid^(1/4) * 10^(-3/20).
inline constexpr std::int32_t kAllocMin = -20;
inline constexpr std::int32_t kAllocMax = 20;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Per-band mean energy e_b(m) = |u_b(m)|^2 / K_b, row-major frames x bands.
std::vector<double> envelope(const MdctSpectrum& spectrum);

/// Envelope index i such that 10*log10(e) lies in [3i - 1.5, 3i + 1.5),
/// or kSilentEnvIndex below the floor. Negative e is invalid.
std::int32_t quantize_envelope(double e);

/// Quantization interval in the energy domain. The silent index maps to
/// [0, floor).
Interval env_interval(std::int32_t index);

/// Geometric midpoint sqrt(lo*hi) of the interval; 0 for the silent index.
double env_midpoint(std::int32_t index);

/// Line quantizer stepsize for a band with envelope midpoint env_mid at the
/// given allocation level. Returns 0 for silent bands (env_mid == 0).
double line_step(double env_mid, std::int32_t alloc);

/// Uniform quantization k = round(u/delta); bin k covers
/// [(k-1/2)*delta, (k+1/2)*delta).
std::int32_t quantize_line(double u, double delta);
void quantize_lines(std::span<const double> u, double delta, std::span<std::int32_t> out);

Interval bin_interval(std::int32_t index, double delta);

}  // namespace ipsc
