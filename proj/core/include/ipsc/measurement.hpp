#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ipsc/band_layout.hpp"

namespace ipsc {

/// In-memory marker for a band with no envelope constraint at all
/// (full-support conditioning). Never serialized to a bitstream.
inline constexpr std::int32_t kUncodedEnvIndex = INT32_MIN;

/// The discrete encoder output: per-frame/band envelope interval indices,
/// per-line quantization bin indices, and per-frame allocation levels.
///
/// Validity: alloc levels in [kAllocMin, kAllocMax]; bands whose envelope
/// index is silent or uncoded carry all-zero bin indices (their lines are
/// uncoded and the zeros are placeholders).
struct Measurement {
    std::size_t frames = 0;
    std::vector<std::int32_t> env_indices;   // frames * layout.bands()
    std::vector<std::int32_t> bin_indices;   // frames * kStride
    std::vector<std::int32_t> alloc_levels;  // frames
    std::vector<std::uint8_t> overflow;      // frames, rate-loop overflow flags
    BandLayout layout;

    std::int32_t env(std::size_t m, int b) const { return env_indices[m * layout.bands() + b]; }
    std::int32_t& env(std::size_t m, int b) { return env_indices[m * layout.bands() + b]; }

    std::span<const std::int32_t> bins(std::size_t m) const {
        return {bin_indices.data() + m * kStride, static_cast<std::size_t>(kStride)};
    }
    std::span<std::int32_t> bins(std::size_t m) {
        return {bin_indices.data() + m * kStride, static_cast<std::size_t>(kStride)};
    }

    bool operator==(const Measurement& other) const {
        return frames == other.frames && env_indices == other.env_indices &&
               bin_indices == other.bin_indices && alloc_levels == other.alloc_levels &&
               overflow == other.overflow && layout == other.layout;
    }
};

/// Empty measurement with the right shapes (env silent, bins zero, alloc 0).
Measurement make_empty_measurement(std::size_t frames, const BandLayout& layout);

/// Throws InvalidInput if shapes or the validity rules above are violated.
void validate_measurement(const Measurement& m);

}  // namespace ipsc
