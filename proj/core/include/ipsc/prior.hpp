#pragma once

#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

namespace ipsc {

/// Pluggable unconditional score model: score(x, sigma) estimates
/// grad log p(x; sigma) of the sigma-smoothed prior.
class PriorScore {
public:
    virtual ~PriorScore() = default;

    virtual std::size_t dimension() const = 0;

    virtual void score(std::span<const double> x, double sigma,
                       std::span<double> out) const = 0;

    /// Whether vjp() is available (needed by the Tweedie-mean decoder mode).
    virtual bool has_vjp() const { return false; }

    /// out = v^T grad m(x) with m(x) = x + sigma^2 * score(x, sigma).
    /// Throws CapabilityError unless has_vjp().
    virtual void vjp(std::span<const double> x, double sigma, std::span<const double> v,
                     std::span<double> out) const;

    /// Safe to call score/vjp from multiple threads concurrently.
    virtual bool concurrent_safe() const { return true; }
};

/// Stationary Gaussian prior with AR(1) covariance
/// Sigma_ij = var * rho^|i-j|. Scores and vjp are exact: the precision matrix
/// of an AR(1) process is tridiagonal, so (Sigma + sigma^2 I)^-1 x reduces to
/// an O(N) symmetric tridiagonal solve. Factorizations are cached per sigma.
class GaussianProcessPrior : public PriorScore {
public:
    GaussianProcessPrior(std::size_t n, double rho, double var);

    std::size_t dimension() const override { return n_; }
    void score(std::span<const double> x, double sigma, std::span<double> out) const override;
    bool has_vjp() const override { return true; }
    void vjp(std::span<const double> x, double sigma, std::span<const double> v,
             std::span<double> out) const override;

    double rho() const { return rho_; }
    double var() const { return var_; }

    /// Draws an exact sample from the prior (used by evaluation baselines).
    std::vector<double> sample(std::uint64_t seed) const;

private:
    struct Factor {
        double sigma = -1.0;
        std::vector<double> d;  // LDL diagonal
        std::vector<double> l;  // LDL subdiagonal multipliers
        std::uint64_t tick = 0;
    };

    // out = -(Sigma + sigma^2 I)^-1 r
    void apply_neg_inverse(std::span<const double> r, double sigma,
                           std::span<double> out) const;
    std::shared_ptr<const Factor> factor_for(double sigma) const;

    std::size_t n_;
    double rho_;
    double var_;
    double prec_diag_end_;   // precision matrix entries
    double prec_diag_mid_;
    double prec_off_;

    mutable std::mutex cache_mutex_;
    mutable std::vector<std::shared_ptr<Factor>> cache_;
    mutable std::uint64_t tick_ = 0;
};

/// Per-coordinate iid mixture of Gaussians (shared across coordinates).
/// Exact score of the sigma-smoothed density; responsibilities computed in
/// the log domain. No vjp.
class GmmPrior : public PriorScore {
public:
    struct Component {
        double weight;
        double mean;
        double var;
    };

    GmmPrior(std::size_t n, std::vector<Component> components);

    std::size_t dimension() const override { return n_; }
    void score(std::span<const double> x, double sigma, std::span<double> out) const override;

    /// Exact log density of the sigma-smoothed prior (for verification).
    double log_density(std::span<const double> x, double sigma) const;

    const std::vector<Component>& components() const { return components_; }

private:
    std::size_t n_;
    std::vector<Component> components_;
};

/// Loads a prior from the text config format described in the README:
///   kind = ar1        |  kind = gmm
///   rho = 0.9         |  component = <weight> <mean> <var>   (repeated)
///   var = 1.0         |
std::unique_ptr<PriorScore> load_prior(const std::string& path, std::size_t dimension);
std::unique_ptr<PriorScore> parse_prior(const std::string& text, std::size_t dimension);

}  // namespace ipsc
