#pragma once

#include <cmath>
#include <cstdint>

namespace ecx {

/// SplitMix64 finalizer. Bit-exact across platforms; the only mixing
/// primitive used anywhere in the artifact.
inline std::uint64_t splitmix64_finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Per-task seed derivation: finalizer applied to
/// master_seed XOR (index * 0x9E3779B97F4A7C15).
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) {
    return splitmix64_finalize(master_seed ^ (index * 0x9E3779B97F4A7C15ULL));
}

/// SplitMix64 stream generator with hand-rolled distributions.
/// std:: distributions are implementation-defined, so everything that
/// must reproduce bit-exactly goes through this class.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return splitmix64_finalize(state_);
    }

    /// Uniform in [0,1) with 53 random bits.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform point in the disc of radius r (polar inversion, two draws).
    void in_disc(double r, double& x, double& y) {
        const double rad = r * std::sqrt(uniform01());
        const double ang = 2.0 * M_PI * uniform01();
        x = rad * std::cos(ang);
        y = rad * std::sin(ang);
    }

    /// Poisson by CDF inversion; means above 50 are split into independent
    /// chunks so the running probability never underflows.
    std::uint64_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        if (mean > 50.0) {
            const auto chunks = static_cast<std::uint64_t>(mean / 50.0) + 1;
            std::uint64_t total = 0;
            for (std::uint64_t c = 0; c < chunks; ++c) total += poisson_small(mean / static_cast<double>(chunks));
            return total;
        }
        return poisson_small(mean);
    }

  private:
    std::uint64_t poisson_small(double mean) {
        const double u = uniform01();
        double p = std::exp(-mean);
        double cdf = p;
        std::uint64_t k = 0;
        while (u > cdf && k < 100000) {
            ++k;
            p *= mean / static_cast<double>(k);
            cdf += p;
        }
        return k;
    }

    std::uint64_t state_;
};

}  // namespace ecx
