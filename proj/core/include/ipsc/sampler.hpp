#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "ipsc/audio.hpp"
#include "ipsc/conditioning.hpp"
#include "ipsc/measurement.hpp"
#include "ipsc/prior.hpp"

namespace ipsc {

/// Geometric noise schedule sigma[0] > ... > sigma[steps] with step scale eps.
struct NoiseSchedule {
    std::vector<double> sigma;
    double eps = 0.5;

    int steps() const { return static_cast<int>(sigma.size()) - 1; }
};

/// Inclusive geometric schedule between the two variance endpoints (in dB).
NoiseSchedule make_schedule(int steps, double sigma2_start_db, double sigma2_end_db,
                            double eps);

/// Update coefficients for step i in [1, steps]:
///   x <- x + alpha * S(x, sigma[i]) + sqrt(beta_sq) * n
/// with alpha = eps * sigma[i]^2 and beta_sq = 2 * eps * sigma[i+1]^2
/// (zero at the final step, which adds no noise).
struct StepCoeffs {
    double alpha = 0.0;
    double beta_sq = 0.0;
};
StepCoeffs step_coeffs(const NoiseSchedule& schedule, int i);

struct SamplerProgress {
    int step = 0;
    double sigma = 0.0;
    double prior_score_norm = 0.0;
    double measurement_score_norm = 0.0;
    double consistency = -1.0;  // -1 when no probe is configured
};

struct LangevinOptions {
    std::uint64_t seed = 0;
    int progress_stride = 0;  // report every k steps; 0 disables
    std::function<void(const SamplerProgress&)> progress;
    std::function<double(std::span<const double>)> consistency_probe;
};

struct LangevinResult {
    std::vector<double> x;
    std::uint64_t normal_draws = 0;
};

/// Conditional annealed Langevin sampling with an arbitrary measurement
/// score term (pass nullptr for unconditional sampling). Deterministic given
/// the seed; throws NumericalError on a non-finite iterate.
using MeasurementScoreFn =
    std::function<std::vector<double>(std::span<const double>, double)>;

LangevinResult langevin_core(std::size_t n, const PriorScore& prior,
                             const MeasurementScoreFn& measurement,
                             const NoiseSchedule& schedule, const LangevinOptions& opts);

/// Decodes a codec measurement by posterior sampling.
AudioSignal langevin_sample(const Measurement& y, const PriorScore& prior,
                            const ConditioningConfig& cfg, const NoiseSchedule& schedule,
                            std::uint64_t seed, const LangevinOptions* extra = nullptr);

/// Fraction of envelope intervals and line bins of g(x) matching y,
/// measured over interior frames (edge frames overlap the analysis padding).
struct ConsistencyReport {
    double env_rate = 1.0;
    double bin_rate = 1.0;
    double overall = 1.0;
};
ConsistencyReport consistency_rate(const AudioSignal& x, const Measurement& y);

}  // namespace ipsc
