#include "ipsc/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "ipsc/errors.hpp"
#include "ipsc/mdct.hpp"
#include "ipsc/quant.hpp"

namespace ipsc {

double snr(const AudioSignal& reference, const AudioSignal& test) {
    if (reference.samples.size() != test.samples.size()) {
        throw InvalidInput("snr: length mismatch");
    }
    double ref = 0.0, err = 0.0;
    for (std::size_t i = 0; i < reference.samples.size(); ++i) {
        double d = reference.samples[i] - test.samples[i];
        ref += reference.samples[i] * reference.samples[i];
        err += d * d;
    }
    if (ref == 0.0) throw MetricError("snr undefined for a zero reference");
    if (err == 0.0) return 200.0;
    return std::min(10.0 * std::log10(ref / err), 200.0);
}

double band_lsd(const AudioSignal& reference, const AudioSignal& test) {
    if (reference.samples.size() != test.samples.size()) {
        throw InvalidInput("band_lsd: length mismatch");
    }
    const AudioSignal ref = pad_to_stride(reference);
    const AudioSignal tst = pad_to_stride(test);
    auto eref = envelope(mdct().analyze(ref));
    auto etst = envelope(mdct().analyze(tst));
    const double floor_e = std::pow(10.0, kEnvFloorDb / 10.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < eref.size(); ++i) {
        double a = std::max(eref[i], floor_e);
        double b = std::max(etst[i], floor_e);
        double d = 10.0 * std::log10(a / b);
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(eref.size()));
}

}  // namespace ipsc
