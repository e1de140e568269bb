#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "ipsc/codec.hpp"
#include "ipsc/errors.hpp"
#include "ipsc/sampler.hpp"
#include "ipsc/specfun.hpp"

using namespace ipsc;
using namespace testutil;

TEST_CASE("schedule is geometric with the forced ratio") {
    auto s = make_schedule(1500, 0.0, -90.0, 0.5);
    REQUIRE(s.sigma.size() == 1501);
    CHECK(s.sigma[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s.sigma[1500] == doctest::Approx(std::pow(10.0, -90.0 / 20.0)).epsilon(1e-12));
    const double ratio = std::pow(10.0, -90.0 / (20.0 * 1500.0));
    for (int i = 0; i < 1500; ++i) {
        CHECK(std::abs(s.sigma[i + 1] / s.sigma[i] / ratio - 1.0) < 1e-12);
    }
    // log sigma affine in i.
    double d0 = std::log(s.sigma[1]) - std::log(s.sigma[0]);
    for (int i = 0; i < 1500; ++i) {
        CHECK(std::abs((std::log(s.sigma[i + 1]) - std::log(s.sigma[i])) - d0) < 1e-12);
    }
}

TEST_CASE("minimal and preset schedules") {
    auto tiny = make_schedule(2, 0.0, -20.0, 0.5);
    REQUIRE(tiny.sigma.size() == 3);
    CHECK(tiny.sigma[1] / tiny.sigma[0] == doctest::Approx(tiny.sigma[2] / tiny.sigma[1]));

    // Stability preset: 1250 steps down to -75 dB.
    auto preset = make_schedule(1250, 0.0, -75.0, 0.5);
    CHECK(preset.sigma.back() == doctest::Approx(std::pow(10.0, -75.0 / 20.0)).epsilon(1e-12));

    CHECK_THROWS_AS(make_schedule(1, 0.0, -90.0, 0.5), InvalidInput);
    CHECK_THROWS_AS(make_schedule(100, -90.0, 0.0, 0.5), InvalidInput);
    CHECK_THROWS_AS(make_schedule(100, 0.0, -90.0, 0.0), InvalidInput);
}

TEST_CASE("step coefficient law holds exactly") {
    auto s = make_schedule(200, 0.0, -60.0, 0.5);
    for (int i = 1; i <= 200; ++i) {
        auto c = step_coeffs(s, i);
        CHECK(c.alpha == s.eps * s.sigma[i] * s.sigma[i]);
        if (i < 200) {
            CHECK(c.beta_sq == 2.0 * step_coeffs(s, i + 1).alpha);
        } else {
            CHECK(c.beta_sq == 0.0);
        }
    }
}

TEST_CASE("sampler is deterministic and the final step draws no noise") {
    const std::size_t n = 64;
    GaussianProcessPrior prior(n, 0.5, 1.0);
    auto sched = make_schedule(50, 0.0, -40.0, 0.5);
    LangevinOptions opts;
    opts.seed = 123;
    auto a = langevin_core(n, prior, nullptr, sched, opts);
    auto b = langevin_core(n, prior, nullptr, sched, opts);
    CHECK(a.x == b.x);
    // n initial draws plus n per noisy step (all but the final one).
    CHECK(a.normal_draws == n * (1 + 50 - 1));

    opts.seed = 124;
    auto c = langevin_core(n, prior, nullptr, sched, opts);
    CHECK(a.x != c.x);
}

TEST_CASE("non-finite iterates abort with diagnostics") {
    struct BadPrior : PriorScore {
        std::size_t dimension() const override { return 8; }
        void score(std::span<const double>, double, std::span<double> out) const override {
            for (auto& v : out) v = std::nan("");
        }
    } bad;
    auto sched = make_schedule(10, 0.0, -30.0, 0.5);
    LangevinOptions opts;
    try {
        langevin_core(8, bad, nullptr, sched, opts);
        FAIL("expected NumericalError");
    } catch (const NumericalError& e) {
        CHECK(e.step == 1);
        CHECK(e.sigma == doctest::Approx(sched.sigma[1]));
    }
}

TEST_CASE("unconditional samples from a unit white prior have unit variance") {
    const std::size_t n = 1024;
    GaussianProcessPrior prior(n, 0.0, 1.0);
    auto sched = make_schedule(400, 0.0, -90.0, 0.5);
    double mean_var = 0.0;
    const int seeds = 5;
    for (int s = 0; s < seeds; ++s) {
        LangevinOptions opts;
        opts.seed = 1000 + s;
        auto r = langevin_core(n, prior, nullptr, sched, opts);
        double var = 0.0;
        for (double v : r.x) var += v * v;
        mean_var += var / n;
    }
    mean_var /= seeds;
    CHECK(mean_var > 0.9);
    CHECK(mean_var < 1.1);
}

TEST_CASE("toy posterior matches a rejection-sampling oracle") {
    // N = 8 iid N(0,1) prior; coordinate 0 constrained to [0.5, 1.5].
    const std::size_t n = 8;
    const double lo = 0.5, hi = 1.5;
    GaussianProcessPrior prior(n, 0.0, 1.0);

    // Rejection oracle.
    std::mt19937_64 rng(42);
    std::normal_distribution<double> norm;
    double acc = 0.0, acc2 = 0.0;
    long kept = 0;
    const long draws = 2'000'000;
    for (long i = 0; i < draws; ++i) {
        double v = norm(rng);
        if (v >= lo && v < hi) {
            acc += v;
            acc2 += v * v;
            ++kept;
        }
    }
    const double oracle_mean = acc / kept;
    const double oracle_var = acc2 / kept - oracle_mean * oracle_mean;
    const double oracle_se = std::sqrt(oracle_var / kept);

    auto meas = [&](std::span<const double> x, double sigma) {
        std::vector<double> s(n, 0.0);
        s[0] = specfun::q_gauss(x[0], lo, hi, sigma);
        return s;
    };
    auto sched = make_schedule(800, 0.0, -80.0, 0.5);
    const int runs = 80;
    double lm = 0.0, lm2 = 0.0;
    double other = 0.0, other2 = 0.0;
    for (int s = 0; s < runs; ++s) {
        LangevinOptions opts;
        opts.seed = 5000 + s;
        auto r = langevin_core(n, prior, meas, sched, opts);
        lm += r.x[0];
        lm2 += r.x[0] * r.x[0];
        other += r.x[3];
        other2 += r.x[3] * r.x[3];
    }
    double langevin_mean = lm / runs;
    double langevin_var = lm2 / runs - langevin_mean * langevin_mean;
    double se_mean = std::sqrt(langevin_var / runs) + oracle_se;
    CHECK(std::abs(langevin_mean - oracle_mean) < 4.0 * se_mean);
    double se_var = langevin_var * std::sqrt(2.0 / (runs - 1)) + 1e-3;
    CHECK(std::abs(langevin_var - oracle_var) < 4.0 * se_var);
    // Unconstrained coordinates stay standard normal.
    double om = other / runs;
    CHECK(std::abs(om) < 4.0 / std::sqrt(static_cast<double>(runs)));
    CHECK(std::abs(other2 / runs - om * om - 1.0) < 0.5);
}

TEST_CASE("consistency rate of the deterministic reconstruction") {
    auto sig = random_signal(4 * kStride, 9, 0.3);
    auto enc = encode(sig, 16.0);
    auto out = decode_legacy(enc.bytes, 0, /*noise_fill=*/false);
    auto rep = consistency_rate(out, enc.measurement);
    CHECK(rep.bin_rate == 1.0);

    // Unrelated noise at a different level is far less consistent.
    auto junk = random_signal(out.samples.size(), 77, 0.02);
    auto junk_rep = consistency_rate(junk, enc.measurement);
    CHECK(junk_rep.overall < rep.overall);
    CHECK(junk_rep.env_rate < 0.05);
}

TEST_CASE("langevin_sample decodes a real measurement deterministically") {
    auto sig = ar1_signal(2 * kStride, 0.9, 0.05, 3);
    auto enc = encode(sig, 16.0);
    const std::size_t n = Mdct::signal_length(enc.measurement.frames);
    GaussianProcessPrior prior(n, 0.9, 0.05);
    ConditioningConfig cfg;
    auto sched = make_schedule(120, 0.0, -60.0, 0.5);

    auto a = langevin_sample(enc.measurement, prior, cfg, sched, 11);
    auto b = langevin_sample(enc.measurement, prior, cfg, sched, 11);
    CHECK(a.samples == b.samples);
    REQUIRE(a.samples.size() == n);

    // Even a short run is far more consistent than an unconditional draw.
    auto uncond = prior.sample(11);
    AudioSignal us;
    us.samples = uncond;
    double c_inv = consistency_rate(a, enc.measurement).overall;
    double c_unc = consistency_rate(us, enc.measurement).overall;
    CHECK(c_inv > c_unc);
}

TEST_CASE("progress callback fires with diagnostics") {
    auto sig = ar1_signal(2 * kStride, 0.8, 0.05, 5);
    auto enc = encode(sig, 16.0);
    const std::size_t n = Mdct::signal_length(enc.measurement.frames);
    GaussianProcessPrior prior(n, 0.8, 0.05);
    ConditioningConfig cfg;
    auto sched = make_schedule(40, 0.0, -40.0, 0.5);
    int calls = 0;
    double last_consistency = -2.0;
    LangevinOptions opts;
    opts.progress_stride = 10;
    opts.progress = [&](const SamplerProgress& p) {
        ++calls;
        CHECK(p.sigma > 0.0);
        CHECK(p.prior_score_norm >= 0.0);
        last_consistency = p.consistency;
    };
    langevin_sample(enc.measurement, prior, cfg, sched, 3, &opts);
    CHECK(calls == 4);
    CHECK(last_consistency >= 0.0);
    CHECK(last_consistency <= 1.0);
}
