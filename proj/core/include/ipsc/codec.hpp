#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ipsc/audio.hpp"
#include "ipsc/measurement.hpp"
#include "ipsc/mdct.hpp"
#include "ipsc/quant.hpp"

namespace ipsc {

struct StreamInfo {
    int sample_rate = kSampleRate;
    double target_kbps = 0.0;
};

struct RateChoice {
    std::int32_t alloc = kAllocMax;
    bool overflow = false;
    std::int64_t bits = 0;  // byte-aligned frame cost at the chosen level
};

struct EncodeResult {
    std::vector<std::uint8_t> bytes;
    Measurement measurement;
    double realized_kbps = 0.0;
};

struct DecodedStream {
    Measurement measurement;
    StreamInfo info;
};

/// Serializes a valid Measurement to the bitstream format:
/// magic "IPSC", version, sample rate, stride, frame count, layout id,
/// target bitrate, then per frame (byte-aligned): overflow flag, allocation
/// delta, per-band envelope deltas, and run-length-escaped line bin indices,
/// all Exp-Golomb coded.
std::vector<std::uint8_t> encode_measurement(const Measurement& m, const StreamInfo& info);

/// Inverse of encode_measurement; bit-exact round trip. Throws DecodeError
/// (with byte offset) on corrupt input.
DecodedStream decode_measurement(std::span<const std::uint8_t> bytes);

/// Line-coding cost in bits of one frame at the given allocation level.
/// Non-increasing in alloc.
std::int64_t frame_line_bits(std::span<const double> frame_coeffs,
                             std::span<const std::int32_t> frame_env_indices,
                             const BandLayout& layout, std::int32_t alloc);

/// Smallest (finest) allocation level whose byte-aligned frame cost fits the
/// budget; falls back to kAllocMax with the overflow flag when none fits.
/// The budget covers the whole frame payload: overflow bit, allocation delta,
/// envelope deltas and line codes.
RateChoice rate_loop(std::span<const double> frame_coeffs,
                     std::span<const std::int32_t> frame_env_indices,
                     const BandLayout& layout, std::int32_t prev_alloc,
                     std::int32_t prev_first_env, std::int64_t budget_bits);

/// Full encoder: MDCT, envelope and line quantization, per-frame rate loop
/// against a running bit budget, lossless coding.
EncodeResult encode(const AudioSignal& signal, double kbps);

/// Deterministic reconstruction at bin midpoints (no noise fill).
MdctSpectrum reconstruct_midpoints(const Measurement& m);

/// Legacy decoder: midpoint reconstruction plus white-noise fill of all-zero
/// bands for frames at the three coarsest allocation levels in the stream,
/// scaled so the band energy matches the envelope interval midpoint.
AudioSignal decode_legacy(std::span<const std::uint8_t> bytes, std::uint64_t noise_seed,
                          bool noise_fill = true);

}  // namespace ipsc
