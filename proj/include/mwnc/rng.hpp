#pragma once

#include <cstdint>

namespace mwnc {

// splitmix64, used for seeding and stream derivation.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256** -- deterministic across platforms, unlike std:: distributions.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in [0, 1), 53-bit mantissa.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    std::uint8_t byte() { return static_cast<std::uint8_t>(next() >> 56); }

    // Uniform integer in [0, n), n > 0.
    std::uint64_t below(std::uint64_t n) {
        // Rejection-free would bias for huge n; rejection loop keeps it exact.
        const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
        std::uint64_t x;
        do { x = next(); } while (x >= limit);
        return x % n;
    }

    // Independent stream derived from this seed and a salt; used to give each
    // simulation run / Monte Carlo shard its own deterministic stream.
    static Rng stream(std::uint64_t seed, std::uint64_t salt) {
        std::uint64_t sm = seed ^ (0x9e3779b97f4a7c15ULL * (salt + 1));
        return Rng(splitmix64(sm));
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t s_[4];
};

}  // namespace mwnc
