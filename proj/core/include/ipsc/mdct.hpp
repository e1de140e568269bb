#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ipsc/audio.hpp"
#include "ipsc/band_layout.hpp"

namespace ipsc {

/// Frames x kStride MDCT coefficient matrix with the band layout attached.
struct MdctSpectrum {
    std::size_t frames = 0;
    std::vector<double> coeffs;  // row-major, frames * kStride
    BandLayout layout;

    std::span<double> row(std::size_t m) {
        return {coeffs.data() + m * kStride, static_cast<std::size_t>(kStride)};
    }
    std::span<const double> row(std::size_t m) const {
        return {coeffs.data() + m * kStride, static_cast<std::size_t>(kStride)};
    }
};

/// Orthonormal MDCT with sine window and 50% overlap.
///
/// A signal of length N (multiple of kStride, N >= 2*kStride) is zero-padded
/// by one stride on each side and analyzed into M = N/kStride + 1 frames.
/// On such signals the transform is an exact isometry: synthesize(analyze(x))
/// reproduces x and coefficient energy equals signal energy.
///
/// analyze/synthesize are const and safe to call concurrently.
class Mdct {
public:
    Mdct();
    ~Mdct();
    Mdct(const Mdct&) = delete;
    Mdct& operator=(const Mdct&) = delete;

    MdctSpectrum analyze(const AudioSignal& signal,
                         const BandLayout& layout = default_band_layout()) const;
    AudioSignal synthesize(const MdctSpectrum& spectrum) const;

    /// Signal length corresponding to an M-frame spectrum.
    static std::size_t signal_length(std::size_t frames) {
        return (frames - 1) * kStride;
    }
    static std::size_t frame_count(std::size_t signal_length) {
        return signal_length / kStride + 1;
    }

private:
    void* plan_ = nullptr;  // fftw_plan for the length-kStride DCT-IV
    std::vector<double> window_;
};

/// Process-wide instance; plan creation is done once.
const Mdct& mdct();

}  // namespace ipsc
