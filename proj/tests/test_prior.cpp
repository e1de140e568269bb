#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ipsc/errors.hpp"
#include "ipsc/prior.hpp"

using namespace ipsc;

namespace {

// Dense AR(1) covariance and a plain Gauss solver, used as the oracle.
std::vector<double> dense_ar1_cov(std::size_t n, double rho, double var) {
    std::vector<double> cov(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            cov[i * n + j] = var * std::pow(rho, std::abs(double(i) - double(j)));
        }
    }
    return cov;
}

std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
        }
        for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
        std::swap(b[col], b[piv]);
        for (std::size_t r = col + 1; r < n; ++r) {
            double f = a[r * n + col] / a[col * n + col];
            for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double acc = b[i];
        for (std::size_t j = i + 1; j < n; ++j) acc -= a[i * n + j] * x[j];
        x[i] = acc / a[i * n + i];
    }
    return x;
}

std::vector<double> random_vec(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

}  // namespace

TEST_CASE("gaussian score basics") {
    GaussianProcessPrior prior(16, 0.8, 0.5);
    std::vector<double> zero(16, 0.0), out(16);
    prior.score(zero, 0.3, out);
    for (double v : out) CHECK(v == 0.0);

    // White prior: score = -x / (var + sigma^2).
    GaussianProcessPrior white(8, 0.0, 0.7);
    auto x = random_vec(8, 3);
    white.score(x, 0.5, out = std::vector<double>(8));
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(out[i] == doctest::Approx(-x[i] / (0.7 + 0.25)).epsilon(1e-12));
    }
}

TEST_CASE("gaussian score solves (Sigma + sigma^2 I) residual to 1e-9") {
    const std::size_t n = 64;
    const double rho = 0.9, var = 0.3, sigma = 0.2;
    GaussianProcessPrior prior(n, rho, var);
    auto x = random_vec(n, 7);
    std::vector<double> score(n);
    prior.score(x, sigma, score);
    // (Sigma + s^2 I) * (-score) should reproduce x.
    auto cov = dense_ar1_cov(n, rho, var);
    std::vector<double> resid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double a = cov[i * n + j] + (i == j ? sigma * sigma : 0.0);
            acc += a * -score[j];
        }
        resid[i] = acc - x[i];
    }
    for (double r : resid) CHECK(std::abs(r) < 1e-9);
}

TEST_CASE("vjp limits and closed forms") {
    const std::size_t n = 32;
    GaussianProcessPrior prior(n, 0.7, 0.4);
    auto v = random_vec(n, 11);
    std::vector<double> out(n), x(n, 0.1);

    // sigma^2 = -90 dB: m is essentially the identity.
    prior.vjp(x, std::pow(10.0, -90.0 / 20.0), v, out);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(out[i] == doctest::Approx(v[i]).epsilon(1e-6));
    }

    // White prior closed form: vjp(v) = v * var / (var + sigma^2).
    GaussianProcessPrior white(n, 0.0, 0.4);
    white.vjp(x, 0.3, v, out);
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(out[i] == doctest::Approx(v[i] * 0.4 / (0.4 + 0.09)).epsilon(1e-12));
    }
}

TEST_CASE("vjp is symmetric") {
    const std::size_t n = 48;
    GaussianProcessPrior prior(n, -0.45, 1.3);
    auto u = random_vec(n, 21);
    auto w = random_vec(n, 22);
    std::vector<double> ju(n), jw(n), x(n, 0.0);
    prior.vjp(x, 0.37, u, ju);
    prior.vjp(x, 0.37, w, jw);
    double a = 0.0, b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        a += ju[i] * w[i];
        b += u[i] * jw[i];
    }
    CHECK(a == doctest::Approx(b).epsilon(1e-9));
}

TEST_CASE("Tweedie mean is the exact conditional mean") {
    const std::size_t n = 48;
    const double rho = 0.85, var = 0.6, sigma = 0.33;
    GaussianProcessPrior prior(n, rho, var);
    auto x = random_vec(n, 31);
    std::vector<double> score(n);
    prior.score(x, sigma, score);
    // m = x + s^2 score should equal Sigma (Sigma + s^2 I)^-1 x.
    auto cov = dense_ar1_cov(n, rho, var);
    auto a = cov;
    for (std::size_t i = 0; i < n; ++i) a[i * n + i] += sigma * sigma;
    auto sol = dense_solve(a, x);
    for (std::size_t i = 0; i < n; ++i) {
        double want = 0.0;
        for (std::size_t j = 0; j < n; ++j) want += cov[i * n + j] * sol[j];
        CHECK(x[i] + sigma * sigma * score[i] == doctest::Approx(want).epsilon(1e-9));
    }
}

TEST_CASE("construction errors") {
    CHECK_THROWS_AS(GaussianProcessPrior(8, 1.0, 1.0), InvalidInput);
    CHECK_THROWS_AS(GaussianProcessPrior(8, 0.5, 0.0), InvalidInput);
    CHECK_THROWS_AS(GmmPrior(8, {}), InvalidInput);
    CHECK_THROWS_AS(GmmPrior(8, {{0.5, 0.0, 1.0}}), InvalidInput);  // weights sum != 1
    CHECK_THROWS_AS(GmmPrior(8, {{1.0, 0.0, -1.0}}), InvalidInput);
}

TEST_CASE("gmm degenerates to a single gaussian") {
    GmmPrior gmm(8, {{1.0, 0.3, 0.9}});
    auto x = random_vec(8, 41);
    std::vector<double> out(8);
    gmm.score(x, 0.2, out);
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(out[i] == doctest::Approx(-(x[i] - 0.3) / (0.9 + 0.04)).epsilon(1e-12));
    }
}

TEST_CASE("gmm score vanishes at a symmetric midpoint") {
    GmmPrior gmm(4, {{0.5, -1.0, 0.2}, {0.5, 1.0, 0.2}});
    std::vector<double> x(4, 0.0), out(4);
    gmm.score(x, 0.15, out);
    for (double v : out) CHECK(std::abs(v) < 1e-14);
}

TEST_CASE("gmm score matches finite differences of the exact log density") {
    GmmPrior gmm(6, {{0.3, -0.8, 0.1}, {0.5, 0.2, 0.3}, {0.2, 1.5, 0.05}});
    auto x = random_vec(6, 51);
    std::vector<double> out(6);
    const double sigma = 0.21;
    gmm.score(x, sigma, out);
    const double h = 1e-6;
    for (std::size_t i = 0; i < 6; ++i) {
        auto xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        double fd = (gmm.log_density(xp, sigma) - gmm.log_density(xm, sigma)) / (2.0 * h);
        CHECK(out[i] == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("prior config parsing") {
    auto ar1 = parse_prior("kind = ar1\nrho = 0.9\nvar = 0.25\n", 16);
    CHECK(ar1->dimension() == 16);
    CHECK(ar1->has_vjp());
    auto* gp = dynamic_cast<GaussianProcessPrior*>(ar1.get());
    REQUIRE(gp != nullptr);
    CHECK(gp->rho() == doctest::Approx(0.9));
    CHECK(gp->var() == doctest::Approx(0.25));

    auto gmm = parse_prior(
        "kind = gmm\ncomponent = 0.5 -1 0.2\ncomponent = 0.5 1 0.2\n", 8);
    CHECK(gmm->dimension() == 8);
    CHECK_FALSE(gmm->has_vjp());

    CHECK_THROWS_AS(parse_prior("kind = ar1\n", 8), ConfigError);
    CHECK_THROWS_AS(parse_prior("kind = nope\n", 8), ConfigError);
    try {
        parse_prior("kind = ar1\nrho 0.9\n", 8);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line == 2);
    }
}

TEST_CASE("vjp capability error") {
    GmmPrior gmm(4, {{1.0, 0.0, 1.0}});
    std::vector<double> x(4, 0.0), v(4, 1.0), out(4);
    CHECK_THROWS_AS(gmm.vjp(x, 0.1, v, out), CapabilityError);
}

TEST_CASE("ar1 exact sampler has the right covariance") {
    GaussianProcessPrior prior(2000, 0.9, 0.5);
    double acc0 = 0.0, acc1 = 0.0;
    const int runs = 50;
    for (int s = 0; s < runs; ++s) {
        auto x = prior.sample(1000 + s);
        for (std::size_t i = 0; i + 1 < x.size(); ++i) {
            acc0 += x[i] * x[i];
            acc1 += x[i] * x[i + 1];
        }
    }
    double var = acc0 / (runs * 1999.0);
    double lag1 = acc1 / (runs * 1999.0);
    CHECK(var == doctest::Approx(0.5).epsilon(0.03));
    CHECK(lag1 / var == doctest::Approx(0.9).epsilon(0.03));
}
