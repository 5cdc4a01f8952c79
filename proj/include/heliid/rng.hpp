#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace heliid {

/// Seedable generator with a platform-independent output sequence.
///
/// Bits come from std::mt19937_64 (its sequence is fixed by the standard),
/// seeded through one SplitMix64 round. Uniform doubles take the top 53 bits;
/// normals use the Marsaglia polar method. The standard library
/// distributions are avoided because their algorithms differ between
/// implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    /// Independent stream `k` of a master seed (trials, restarts).
    static Rng stream(std::uint64_t master_seed, std::uint64_t k)
    {
        return Rng(master_seed + k * kStreamOffset);
    }

    static constexpr std::uint64_t kStreamOffset = 0x9E3779B97F4A7C15ULL;

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer on [0, n).
    std::uint64_t below(std::uint64_t n)
    {
        // Rejection sampling keeps the draw unbiased.
        const std::uint64_t limit = n == 0 ? 0 : (~std::uint64_t{0} - n + 1) % n;
        std::uint64_t x = engine_();
        while (x < limit) x = engine_();
        return x % n;
    }

    /// Standard normal.
    double normal()
    {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double x, y, s;
        do {
            x = 2.0 * uniform() - 1.0;
            y = 2.0 * uniform() - 1.0;
            s = x * x + y * y;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = y * f;
        has_spare_ = true;
        return x * f;
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    static std::uint64_t splitmix64(std::uint64_t z)
    {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace heliid
