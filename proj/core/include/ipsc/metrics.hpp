#pragma once

#include "ipsc/audio.hpp"

namespace ipsc {

struct MetricReport {
    double snr_db = 0.0;
    double band_lsd_db = 0.0;
    double consistency = 0.0;
    double bitrate_kbps = 0.0;
};

/// 10 log10(|ref|^2 / |ref - test|^2), capped at 200 dB; zero reference is a
/// MetricError. Asymmetric in its arguments by definition.
double snr(const AudioSignal& reference, const AudioSignal& test);

/// RMS over frames and bands of |10 log10(e_ref / e_test)| with both
/// envelopes floored at -96 dB. Symmetric.
double band_lsd(const AudioSignal& reference, const AudioSignal& test);

}  // namespace ipsc
