#include "ipsc/conditioning.hpp"

#include <algorithm>
#include <cmath>

#include "ipsc/errors.hpp"
#include "ipsc/mdct.hpp"
#include "ipsc/specfun.hpp"

namespace ipsc {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

double conditioning_noise_scale(double sigma, CovarianceModel model) {
    if (model == CovarianceModel::kNoisy) return sigma;
    return std::sqrt(sigma * sigma / (1.0 + sigma * sigma));
}

void envelope_score(std::span<const double> u_band, Interval env_iv, double sigma,
                    std::span<double> out) {
    if (!(sigma > 0.0)) throw InvalidInput("envelope_score: sigma must be positive");
    const auto k = static_cast<int>(u_band.size());
    if (env_iv.lo <= 0.0 && env_iv.hi == kInf) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
    }
    const double s2 = sigma * sigma;
    double energy = 0.0;
    for (double u : u_band) energy += u * u;
    const double lambda = energy / s2;
    const double xi_lo = k * env_iv.lo / s2;
    const double xi_hi = env_iv.hi == kInf ? kInf : k * env_iv.hi / s2;
    const double q = specfun::q_ncx2(lambda, xi_lo, xi_hi, k);
    const double scale = 2.0 / s2 * q;
    for (std::size_t i = 0; i < u_band.size(); ++i) out[i] = scale * u_band[i];
}

double sample_score(double u, Interval bin, double sigma) {
    if (!(sigma > 0.0)) throw InvalidInput("sample_score: sigma must be positive");
    return specfun::q_gauss(u, bin.lo, bin.hi, sigma);
}

void band_score(std::span<const double> u_band, Interval env_iv,
                std::span<const std::int32_t> bins, double delta, double sigma,
                std::span<double> out) {
    envelope_score(u_band, env_iv, sigma, out);
    if (delta <= 0.0) return;  // lines uncoded
    for (std::size_t i = 0; i < u_band.size(); ++i) {
        out[i] += sample_score(u_band[i], bin_interval(bins[i], delta), sigma);
    }
}

std::vector<double> tweedie_mean(const PriorScore& prior, std::span<const double> x,
                                 double sigma) {
    std::vector<double> m(x.size());
    prior.score(x, sigma, m);
    const double s2 = sigma * sigma;
    for (std::size_t i = 0; i < x.size(); ++i) m[i] = x[i] + s2 * m[i];
    return m;
}

namespace {

// Stacked band scores of the whole spectrum, evaluated in the MDCT domain.
MdctSpectrum spectrum_score(const MdctSpectrum& u, const Measurement& y, double scale) {
    const BandLayout& layout = y.layout;
    MdctSpectrum s{u.frames, std::vector<double>(u.frames * kStride, 0.0), layout};
    for (std::size_t f = 0; f < u.frames; ++f) {
        auto row = u.row(f);
        auto out = s.row(f);
        auto bins = y.bins(f);
        for (int b = 0; b < layout.bands(); ++b) {
            const int begin = layout.begin(b);
            const int width = layout.width(b);
            const std::int32_t env_idx = y.env(f, b);
            Interval env_iv =
                env_idx == kUncodedEnvIndex ? Interval{0.0, kInf} : env_interval(env_idx);
            const double mid = env_idx == kUncodedEnvIndex ? 0.0 : env_midpoint(env_idx);
            const double delta = mid == 0.0 ? 0.0 : line_step(mid, y.alloc_levels[f]);
            band_score(row.subspan(begin, width), env_iv,
                       bins.subspan(begin, width), delta, scale,
                       out.subspan(begin, width));
        }
    }
    return s;
}

}  // namespace

std::vector<double> measurement_score(std::span<const double> x, const Measurement& y,
                                      double sigma, const PriorScore& prior,
                                      const ConditioningConfig& cfg) {
    if (!(sigma > 0.0)) throw InvalidInput("measurement_score: sigma must be positive");
    if (!(cfg.clamp > 0.0)) throw InvalidInput("measurement_score: clamp must be positive");
    const std::size_t n = Mdct::signal_length(y.frames);
    if (x.size() != n) throw InvalidInput("measurement_score: signal/measurement size mismatch");
    if (cfg.mean_model == MeanModel::kTweedie && !prior.has_vjp()) {
        throw CapabilityError("tweedie mean model needs a prior with vjp support");
    }

    const double r = conditioning_noise_scale(sigma, cfg.covariance_model);

    AudioSignal eval_point;
    eval_point.samples = cfg.mean_model == MeanModel::kTweedie
                             ? tweedie_mean(prior, x, sigma)
                             : std::vector<double>(x.begin(), x.end());
    MdctSpectrum u = mdct().analyze(eval_point, y.layout);
    MdctSpectrum s = spectrum_score(u, y, r);
    AudioSignal back = mdct().synthesize(s);

    std::vector<double> out = std::move(back.samples);
    if (cfg.mean_model == MeanModel::kTweedie) {
        std::vector<double> pulled(n);
        prior.vjp(x, sigma, out, pulled);
        out = std::move(pulled);
    }
    const double limit = cfg.clamp / sigma;
    if (std::isfinite(limit)) {
        for (double& v : out) v = std::clamp(v, -limit, limit);
    }
    return out;
}

}  // namespace ipsc
