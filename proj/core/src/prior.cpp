#include "ipsc/prior.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ipsc/errors.hpp"
#include "ipsc/rng.hpp"

namespace ipsc {

void PriorScore::vjp(std::span<const double>, double, std::span<const double>,
                     std::span<double>) const {
    throw CapabilityError("prior does not provide a vector-Jacobian product");
}

GaussianProcessPrior::GaussianProcessPrior(std::size_t n, double rho, double var)
    : n_(n), rho_(rho), var_(var) {
    if (n == 0) throw InvalidInput("prior dimension must be positive");
    if (!(var > 0.0)) throw InvalidInput("marginal variance must be positive");
    if (!(rho > -1.0 && rho < 1.0)) {
        throw InvalidInput("AR(1) coefficient must lie in (-1, 1)");
    }
    const double p = 1.0 / (var * (1.0 - rho * rho));
    prec_diag_end_ = p;
    prec_diag_mid_ = p * (1.0 + rho * rho);
    prec_off_ = -p * rho;
    if (n_ == 1) prec_diag_end_ = 1.0 / var;
}

std::shared_ptr<const GaussianProcessPrior::Factor> GaussianProcessPrior::factor_for(
    double sigma) const {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    ++tick_;
    for (auto& f : cache_) {
        if (f->sigma == sigma) {
            f->tick = tick_;
            return f;
        }
    }
    // A = I + sigma^2 * Precision, symmetric tridiagonal; LDL factorization.
    auto f = std::make_shared<Factor>();
    f->sigma = sigma;
    f->tick = tick_;
    f->d.resize(n_);
    f->l.assign(n_, 0.0);
    const double s2 = sigma * sigma;
    const double off = s2 * prec_off_;
    auto diag = [&](std::size_t i) {
        double t = (i == 0 || i + 1 == n_) ? prec_diag_end_ : prec_diag_mid_;
        return 1.0 + s2 * t;
    };
    f->d[0] = diag(0);
    for (std::size_t i = 1; i < n_; ++i) {
        f->l[i] = off / f->d[i - 1];
        f->d[i] = diag(i) - off * f->l[i];
    }
    if (cache_.size() >= 8) {
        auto oldest = std::min_element(cache_.begin(), cache_.end(),
                                       [](const auto& a, const auto& b) {
                                           return a->tick < b->tick;
                                       });
        *oldest = f;
        return f;
    }
    cache_.push_back(f);
    return f;
}

void GaussianProcessPrior::apply_neg_inverse(std::span<const double> r, double sigma,
                                             std::span<double> out) const {
    // -(Sigma + s^2 I)^-1 r = -(I + s^2 T)^-1 (T r), T the precision matrix.
    std::vector<double> tr(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        double acc = ((i == 0 || i + 1 == n_) ? prec_diag_end_ : prec_diag_mid_) * r[i];
        if (i > 0) acc += prec_off_ * r[i - 1];
        if (i + 1 < n_) acc += prec_off_ * r[i + 1];
        tr[i] = acc;
    }
    auto f = factor_for(sigma);
    // Forward substitution L y = tr, then D, then L^T.
    for (std::size_t i = 1; i < n_; ++i) tr[i] -= f->l[i] * tr[i - 1];
    for (std::size_t i = 0; i < n_; ++i) tr[i] /= f->d[i];
    for (std::size_t i = n_ - 1; i-- > 0;) tr[i] -= f->l[i + 1] * tr[i + 1];
    for (std::size_t i = 0; i < n_; ++i) out[i] = -tr[i];
}

void GaussianProcessPrior::score(std::span<const double> x, double sigma,
                                 std::span<double> out) const {
    if (x.size() != n_ || out.size() != n_) throw InvalidInput("prior dimension mismatch");
    if (!(sigma > 0.0)) throw InvalidInput("sigma must be positive");
    apply_neg_inverse(x, sigma, out);
}

void GaussianProcessPrior::vjp(std::span<const double> x, double sigma,
                               std::span<const double> v, std::span<double> out) const {
    if (x.size() != n_ || v.size() != n_ || out.size() != n_) {
        throw InvalidInput("prior dimension mismatch");
    }
    // grad m = I - s^2 (Sigma + s^2 I)^-1 (symmetric), so
    // v^T grad m = v + s^2 * (-(Sigma + s^2 I)^-1 v).
    apply_neg_inverse(v, sigma, out);
    const double s2 = sigma * sigma;
    for (std::size_t i = 0; i < n_; ++i) out[i] = v[i] + s2 * out[i];
}

std::vector<double> GaussianProcessPrior::sample(std::uint64_t seed) const {
    Rng rng(seed);
    std::vector<double> x(n_);
    const double sd = std::sqrt(var_);
    double cur = sd * rng.normal();
    const double innov = sd * std::sqrt(1.0 - rho_ * rho_);
    for (std::size_t i = 0; i < n_; ++i) {
        x[i] = cur;
        cur = rho_ * cur + innov * rng.normal();
    }
    return x;
}

GmmPrior::GmmPrior(std::size_t n, std::vector<Component> components)
    : n_(n), components_(std::move(components)) {
    if (n == 0) throw InvalidInput("prior dimension must be positive");
    if (components_.empty()) throw InvalidInput("mixture needs at least one component");
    double total = 0.0;
    for (const auto& c : components_) {
        if (!(c.weight > 0.0)) throw InvalidInput("mixture weights must be positive");
        if (!(c.var > 0.0)) throw InvalidInput("mixture variances must be positive");
        total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-6) throw InvalidInput("mixture weights must sum to 1");
    for (auto& c : components_) c.weight /= total;
}

void GmmPrior::score(std::span<const double> x, double sigma, std::span<double> out) const {
    if (x.size() != n_ || out.size() != n_) throw InvalidInput("prior dimension mismatch");
    if (!(sigma > 0.0)) throw InvalidInput("sigma must be positive");
    const double s2 = sigma * sigma;
    const std::size_t c = components_.size();
    std::vector<double> log_norm(c), inv_var(c);
    for (std::size_t j = 0; j < c; ++j) {
        double v = components_[j].var + s2;
        inv_var[j] = 1.0 / v;
        log_norm[j] = std::log(components_[j].weight) - 0.5 * std::log(2.0 * M_PI * v);
    }
    std::vector<double> lr(c);
    for (std::size_t i = 0; i < n_; ++i) {
        double m = -1e308;
        for (std::size_t j = 0; j < c; ++j) {
            double d = x[i] - components_[j].mean;
            lr[j] = log_norm[j] - 0.5 * d * d * inv_var[j];
            m = std::max(m, lr[j]);
        }
        double z = 0.0;
        double acc = 0.0;
        for (std::size_t j = 0; j < c; ++j) {
            double r = std::exp(lr[j] - m);
            z += r;
            acc += r * (-(x[i] - components_[j].mean) * inv_var[j]);
        }
        out[i] = acc / z;
    }
}

double GmmPrior::log_density(std::span<const double> x, double sigma) const {
    const double s2 = sigma * sigma;
    const std::size_t c = components_.size();
    std::vector<double> log_norm(c), inv_var(c);
    for (std::size_t j = 0; j < c; ++j) {
        double v = components_[j].var + s2;
        inv_var[j] = 1.0 / v;
        log_norm[j] = std::log(components_[j].weight) - 0.5 * std::log(2.0 * M_PI * v);
    }
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double m = -1e308;
        std::vector<double> lr(c);
        for (std::size_t j = 0; j < c; ++j) {
            double d = x[i] - components_[j].mean;
            lr[j] = log_norm[j] - 0.5 * d * d * inv_var[j];
            m = std::max(m, lr[j]);
        }
        double z = 0.0;
        for (std::size_t j = 0; j < c; ++j) z += std::exp(lr[j] - m);
        total += m + std::log(z);
    }
    return total;
}

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

}  // namespace

std::unique_ptr<PriorScore> parse_prior(const std::string& text, std::size_t dimension) {
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    std::string kind;
    double rho = 0.0, var = 1.0;
    bool have_rho = false, have_var = false;
    std::vector<GmmPrior::Component> components;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line_no);
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key == "kind") {
            kind = value;
        } else if (key == "rho") {
            rho = std::stod(value);
            have_rho = true;
        } else if (key == "var") {
            var = std::stod(value);
            have_var = true;
        } else if (key == "component") {
            std::istringstream vs(value);
            GmmPrior::Component c{};
            if (!(vs >> c.weight >> c.mean >> c.var)) {
                throw ConfigError("component needs 'weight mean var'", line_no);
            }
            components.push_back(c);
        } else {
            throw ConfigError("unknown key '" + key + "'", line_no);
        }
    }
    if (kind == "ar1") {
        if (!have_rho || !have_var) throw ConfigError("ar1 prior needs rho and var", line_no);
        return std::make_unique<GaussianProcessPrior>(dimension, rho, var);
    }
    if (kind == "gmm") {
        if (components.empty()) throw ConfigError("gmm prior needs components", line_no);
        return std::make_unique<GmmPrior>(dimension, std::move(components));
    }
    throw ConfigError("unknown prior kind '" + kind + "'", line_no);
}

std::unique_ptr<PriorScore> load_prior(const std::string& path, std::size_t dimension) {
    std::ifstream f(path);
    if (!f) throw InvalidInput("cannot open prior config: " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_prior(ss.str(), dimension);
}

}  // namespace ipsc
