#pragma once

#include <cstdint>
#include <random>

namespace ipsc {

/// Seedable generator with a self-contained Box-Muller normal sampler.
/// Not relying on std::normal_distribution keeps output identical across
/// standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Standard normal draw.
    double normal() {
        ++normal_count_;
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - uniform();  // (0, 1]
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Number of normal() calls made so far.
    std::uint64_t normal_count() const { return normal_count_; }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
    std::uint64_t normal_count_ = 0;
};

}  // namespace ipsc
