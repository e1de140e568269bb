#include "ipsc/audio.hpp"

#include <cmath>

namespace ipsc {

bool all_finite(const AudioSignal& s) {
    for (double v : s.samples) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

AudioSignal pad_to_stride(const AudioSignal& s) {
    AudioSignal out = s;
    std::size_t n = out.samples.size();
    std::size_t target = ((n + kStride - 1) / kStride) * kStride;
    if (target < 2 * static_cast<std::size_t>(kStride)) target = 2 * kStride;
    out.samples.resize(target, 0.0);
    return out;
}

}  // namespace ipsc
