#include "ipsc/mdct.hpp"

#include <fftw3.h>

#include <cmath>

#include "ipsc/errors.hpp"

namespace ipsc {

namespace {
constexpr int kL = kStride;
constexpr int kHalf = kL / 2;
const double kPi = 3.14159265358979323846264338327950288;
}  // namespace

Mdct::Mdct() : window_(2 * kL) {
    for (int n = 0; n < 2 * kL; ++n) {
        window_[n] = std::sin(kPi * (n + 0.5) / (2.0 * kL));
    }
    std::vector<double> a(kL), b(kL);
    plan_ = fftw_plan_r2r_1d(kL, a.data(), b.data(), FFTW_REDFT11,
                             FFTW_ESTIMATE | FFTW_UNALIGNED);
}

Mdct::~Mdct() {
    if (plan_) fftw_destroy_plan(static_cast<fftw_plan>(plan_));
}

MdctSpectrum Mdct::analyze(const AudioSignal& signal, const BandLayout& layout) const {
    const std::size_t n = signal.samples.size();
    if (n == 0) throw InvalidInput("mdct: empty signal");
    if (!all_finite(signal)) throw InvalidInput("mdct: signal has non-finite samples");
    if (n % kL != 0 || n < 2 * static_cast<std::size_t>(kL)) {
        throw InvalidInput("mdct: length must be a multiple of the stride and at least two strides");
    }

    const std::size_t frames = frame_count(n);
    std::vector<double> padded(n + 2 * kL, 0.0);
    std::copy(signal.samples.begin(), signal.samples.end(), padded.begin() + kL);

    MdctSpectrum spec{frames, std::vector<double>(frames * kL), layout};
    std::vector<double> s(kL), y(kL), v(2 * kL);
    const double scale = std::sqrt(2.0 / kL) * 0.5;

    for (std::size_t m = 0; m < frames; ++m) {
        const double* frame = padded.data() + m * kL;
        for (int i = 0; i < 2 * kL; ++i) v[i] = window_[i] * frame[i];
        // Fold the 2L windowed samples to L values whose DCT-IV is the MDCT.
        for (int j = 0; j < kHalf; ++j) {
            s[j] = -(v[3 * kHalf - 1 - j] + v[3 * kHalf + j]);
        }
        for (int j = kHalf; j < kL; ++j) {
            s[j] = v[j - kHalf] - v[3 * kHalf - 1 - j];
        }
        fftw_execute_r2r(static_cast<fftw_plan>(plan_), s.data(), y.data());
        auto row = spec.row(m);
        for (int k = 0; k < kL; ++k) row[k] = scale * y[k];
    }
    return spec;
}

AudioSignal Mdct::synthesize(const MdctSpectrum& spectrum) const {
    if (spectrum.frames < 3) throw InvalidInput("mdct: spectrum needs at least three frames");
    if (spectrum.coeffs.size() != spectrum.frames * kL) {
        throw InvalidInput("mdct: frame width does not match the stride");
    }

    const std::size_t n = signal_length(spectrum.frames);
    std::vector<double> padded(n + 2 * kL, 0.0);
    std::vector<double> x(kL), g(kL);
    const double scale = std::sqrt(2.0 / kL) * 0.5;

    for (std::size_t m = 0; m < spectrum.frames; ++m) {
        auto row = spectrum.row(m);
        std::copy(row.begin(), row.end(), x.begin());
        fftw_execute_r2r(static_cast<fftw_plan>(plan_), x.data(), g.data());
        double* out = padded.data() + m * kL;
        // Unfold: mirror of the analysis fold, then window and overlap-add.
        for (int i = 0; i < kHalf; ++i) {
            out[i] += scale * window_[i] * g[i + kHalf];
        }
        for (int i = kHalf; i < 3 * kHalf; ++i) {
            out[i] += scale * window_[i] * -g[3 * kHalf - 1 - i];
        }
        for (int i = 3 * kHalf; i < 2 * kL; ++i) {
            out[i] += scale * window_[i] * -g[i - 3 * kHalf];
        }
    }

    AudioSignal out;
    out.sample_rate = kSampleRate;
    out.samples.assign(padded.begin() + kL, padded.begin() + kL + n);
    return out;
}

const Mdct& mdct() {
    static Mdct instance;
    return instance;
}

}  // namespace ipsc
