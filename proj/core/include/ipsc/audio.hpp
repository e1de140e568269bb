#pragma once

#include <cstddef>
#include <vector>

namespace ipsc {

/// Transform stride in samples. One MDCT frame spans 2*kStride samples
/// and produces kStride coefficients; at 22050 Hz a stride is ~20 ms.
inline constexpr int kStride = 440;

/// The only sample rate the codec operates at.
inline constexpr int kSampleRate = 22050;

/// Mono audio at a fixed sample rate, samples nominally in [-1, 1].
struct AudioSignal {
    std::vector<double> samples;
    int sample_rate = kSampleRate;

    std::size_t size() const { return samples.size(); }
    double duration_seconds() const {
        return static_cast<double>(samples.size()) / sample_rate;
    }
};

/// True if every sample is finite.
bool all_finite(const AudioSignal& s);

/// Returns a copy padded with trailing zeros so the length is a positive
/// multiple of kStride and at least 2*kStride.
AudioSignal pad_to_stride(const AudioSignal& s);

}  // namespace ipsc
