#include "ipsc/quant.hpp"

#include <cmath>

#include "ipsc/errors.hpp"

namespace ipsc {

std::vector<double> envelope(const MdctSpectrum& spectrum) {
    const BandLayout& layout = spectrum.layout;
    const int bands = layout.bands();
    std::vector<double> env(spectrum.frames * bands);
    for (std::size_t m = 0; m < spectrum.frames; ++m) {
        auto row = spectrum.row(m);
        for (int b = 0; b < bands; ++b) {
            double acc = 0.0;
            for (int k = layout.begin(b); k < layout.end(b); ++k) acc += row[k] * row[k];
            env[m * bands + b] = acc / layout.width(b);
        }
    }
    return env;
}

std::int32_t quantize_envelope(double e) {
    if (e < 0.0 || !std::isfinite(e)) throw InvalidInput("envelope energy must be finite and >= 0");
    if (e == 0.0) return kSilentEnvIndex;
    double db = 10.0 * std::log10(e);
    if (db < kEnvFloorDb) return kSilentEnvIndex;
    return static_cast<std::int32_t>(std::floor(db / kEnvStepDb + 0.5));
}

Interval env_interval(std::int32_t index) {
    if (index == kSilentEnvIndex) {
        return {0.0, std::pow(10.0, kEnvFloorDb / 10.0)};
    }
    double lo_db = kEnvStepDb * index - 0.5 * kEnvStepDb;
    double hi_db = kEnvStepDb * index + 0.5 * kEnvStepDb;
    return {std::pow(10.0, lo_db / 10.0), std::pow(10.0, hi_db / 10.0)};
}

double env_midpoint(std::int32_t index) {
    if (index == kSilentEnvIndex) return 0.0;
    return std::pow(10.0, kEnvStepDb * index / 10.0);
}

double line_step(double env_mid, std::int32_t alloc) {
    if (env_mid == 0.0) return 0.0;
    return std::pow(env_mid, 0.25) * std::pow(10.0, (1.5 * alloc - 3.0) / 20.0);
}

std::int32_t quantize_line(double u, double delta) {
    if (delta <= 0.0) throw InvalidInput("line stepsize must be positive");
    return static_cast<std::int32_t>(std::floor(u / delta + 0.5));
}

void quantize_lines(std::span<const double> u, double delta, std::span<std::int32_t> out) {
    if (delta <= 0.0) throw InvalidInput("line stepsize must be positive");
    for (std::size_t i = 0; i < u.size(); ++i) {
        out[i] = static_cast<std::int32_t>(std::floor(u[i] / delta + 0.5));
    }
}

Interval bin_interval(std::int32_t index, double delta) {
    return {(index - 0.5) * delta, (index + 0.5) * delta};
}

}  // namespace ipsc
