#pragma once

#include <limits>
#include <span>
#include <vector>

#include "ipsc/measurement.hpp"
#include "ipsc/prior.hpp"
#include "ipsc/quant.hpp"

namespace ipsc {

enum class MeanModel { kNoisy, kTweedie };
enum class CovarianceModel { kNoisy, kPgdm };

struct ConditioningConfig {
    MeanModel mean_model = MeanModel::kNoisy;
    CovarianceModel covariance_model = CovarianceModel::kNoisy;
    /// Per-coordinate magnitude limit clamp/sigma on the time-domain
    /// measurement score; +inf disables clamping.
    double clamp = 5.0;
};

/// Effective noise scale of the conditional model: sigma for the noisy
/// covariance, sqrt(sigma^2 / (1 + sigma^2)) for the isotropic Tweedie
/// covariance substitute.
double conditioning_noise_scale(double sigma, CovarianceModel model);

/// Score of the envelope interval condition for one band: a radial vector
/// (2/sigma^2) q_ncx2(|u|^2/sigma^2; K e_lo/sigma^2, K e_hi/sigma^2, K) u.
/// env_iv is in the energy domain; {0, inf} means unconstrained.
void envelope_score(std::span<const double> u_band, Interval env_iv, double sigma,
                    std::span<double> out);

/// Score of one line's quantization bin condition.
double sample_score(double u, Interval bin, double sigma);

/// Envelope score plus the diagonal stack of sample scores for one band.
/// delta == 0 marks uncoded lines (silent or unconstrained bands).
void band_score(std::span<const double> u_band, Interval env_iv,
                std::span<const std::int32_t> bins, double delta, double sigma,
                std::span<double> out);

/// m(x) = x + sigma^2 * prior.score(x, sigma).
std::vector<double> tweedie_mean(const PriorScore& prior, std::span<const double> x,
                                 double sigma);

/// Full measurement score grad log P(y | x; sigma) in the time domain.
/// Noisy mean: band scores at U(x); Tweedie mean: band scores at U(m(x)) with
/// the covariance model's noise scale, pulled back through the prior's
/// vector-Jacobian product. The per-coordinate clamp is applied last.
std::vector<double> measurement_score(std::span<const double> x, const Measurement& y,
                                      double sigma, const PriorScore& prior,
                                      const ConditioningConfig& cfg);

}  // namespace ipsc
