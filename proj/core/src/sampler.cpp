#include "ipsc/sampler.hpp"

#include <cmath>

#include "ipsc/codec.hpp"
#include "ipsc/errors.hpp"
#include "ipsc/mdct.hpp"
#include "ipsc/rng.hpp"

namespace ipsc {

NoiseSchedule make_schedule(int steps, double sigma2_start_db, double sigma2_end_db,
                            double eps) {
    if (steps < 2) throw InvalidInput("schedule needs at least 2 steps");
    if (!(sigma2_start_db > sigma2_end_db)) {
        throw InvalidInput("schedule must anneal downward (start > end)");
    }
    if (!(eps > 0.0)) throw InvalidInput("eps must be positive");
    NoiseSchedule s;
    s.eps = eps;
    s.sigma.resize(steps + 1);
    for (int i = 0; i <= steps; ++i) {
        double db = sigma2_start_db + (sigma2_end_db - sigma2_start_db) *
                                          (static_cast<double>(i) / steps);
        s.sigma[i] = std::pow(10.0, db / 20.0);
    }
    return s;
}

StepCoeffs step_coeffs(const NoiseSchedule& schedule, int i) {
    if (i < 1 || i > schedule.steps()) throw InvalidInput("step index out of range");
    StepCoeffs c;
    c.alpha = schedule.eps * schedule.sigma[i] * schedule.sigma[i];
    c.beta_sq = i < schedule.steps()
                    ? 2.0 * (schedule.eps * schedule.sigma[i + 1] * schedule.sigma[i + 1])
                    : 0.0;
    return c;
}

LangevinResult langevin_core(std::size_t n, const PriorScore& prior,
                             const MeasurementScoreFn& measurement,
                             const NoiseSchedule& schedule, const LangevinOptions& opts) {
    if (prior.dimension() != n) throw InvalidInput("prior dimension mismatch");
    const int steps = schedule.steps();
    Rng rng(opts.seed);

    std::vector<double> x(n);
    for (auto& v : x) v = schedule.sigma[0] * rng.normal();

    std::vector<double> prior_s(n);
    for (int i = 1; i <= steps; ++i) {
        const double sigma = schedule.sigma[i];
        const StepCoeffs c = step_coeffs(schedule, i);

        prior.score(x, sigma, prior_s);
        std::vector<double> meas_s;
        if (measurement) meas_s = measurement(x, sigma);

        const double beta = std::sqrt(c.beta_sq);
        for (std::size_t j = 0; j < n; ++j) {
            double s = prior_s[j] + (meas_s.empty() ? 0.0 : meas_s[j]);
            x[j] += c.alpha * s;
        }
        if (i < steps) {
            for (std::size_t j = 0; j < n; ++j) x[j] += beta * rng.normal();
        }

        for (std::size_t j = 0; j < n; ++j) {
            if (!std::isfinite(x[j])) {
                throw NumericalError("langevin iterate diverged", i, sigma);
            }
        }

        if (opts.progress_stride > 0 && opts.progress &&
            (i % opts.progress_stride == 0 || i == steps)) {
            SamplerProgress p;
            p.step = i;
            p.sigma = sigma;
            double pn = 0.0, mn = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                pn += prior_s[j] * prior_s[j];
                if (!meas_s.empty()) mn += meas_s[j] * meas_s[j];
            }
            p.prior_score_norm = std::sqrt(pn);
            p.measurement_score_norm = std::sqrt(mn);
            if (opts.consistency_probe) p.consistency = opts.consistency_probe(x);
            opts.progress(p);
        }
    }
    return {std::move(x), rng.normal_count()};
}

AudioSignal langevin_sample(const Measurement& y, const PriorScore& prior,
                            const ConditioningConfig& cfg, const NoiseSchedule& schedule,
                            std::uint64_t seed, const LangevinOptions* extra) {
    const std::size_t n = Mdct::signal_length(y.frames);
    LangevinOptions opts;
    if (extra) opts = *extra;
    opts.seed = seed;
    if (opts.progress_stride > 0 && !opts.consistency_probe) {
        opts.consistency_probe = [&y](std::span<const double> x) {
            AudioSignal s;
            s.samples.assign(x.begin(), x.end());
            return consistency_rate(s, y).overall;
        };
    }
    auto meas = [&y, &prior, &cfg](std::span<const double> x, double sigma) {
        return measurement_score(x, y, sigma, prior, cfg);
    };
    LangevinResult r = langevin_core(n, prior, meas, schedule, opts);
    AudioSignal out;
    out.sample_rate = kSampleRate;
    out.samples = std::move(r.x);
    return out;
}

ConsistencyReport consistency_rate(const AudioSignal& x, const Measurement& y) {
    const std::size_t n = Mdct::signal_length(y.frames);
    if (x.samples.size() != n) throw InvalidInput("consistency_rate: size mismatch");
    const BandLayout& layout = y.layout;
    MdctSpectrum u = mdct().analyze(x, layout);
    auto env = envelope(u);

    // Edge frames overlap the zero padding where the transform is a
    // projection rather than a bijection, so they are excluded.
    std::size_t env_total = 0, env_match = 0, bin_total = 0, bin_match = 0;
    for (std::size_t f = 1; f + 1 < y.frames; ++f) {
        auto bins = y.bins(f);
        auto row = u.row(f);
        for (int b = 0; b < layout.bands(); ++b) {
            const std::int32_t idx = y.env(f, b);
            if (idx == kUncodedEnvIndex) continue;
            const Interval iv = env_interval(idx);
            const double e = env[f * layout.bands() + b];
            ++env_total;
            if (e >= iv.lo && e < iv.hi) ++env_match;
            const double mid = env_midpoint(idx);
            if (mid == 0.0) continue;
            const double delta = line_step(mid, y.alloc_levels[f]);
            for (int k = layout.begin(b); k < layout.end(b); ++k) {
                ++bin_total;
                if (quantize_line(row[k], delta) == bins[k]) ++bin_match;
            }
        }
    }
    ConsistencyReport r;
    if (env_total > 0) r.env_rate = static_cast<double>(env_match) / env_total;
    if (bin_total > 0) r.bin_rate = static_cast<double>(bin_match) / bin_total;
    if (env_total + bin_total > 0) {
        r.overall = static_cast<double>(env_match + bin_match) / (env_total + bin_total);
    }
    return r;
}

}  // namespace ipsc
