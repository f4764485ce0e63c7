#pragma once

#include <array>
#include <cstdint>
#include <cmath>

#include "ppgof/math/normal.hpp"

// Self-contained random number generation so that every draw is
// bit-reproducible across platforms and thread counts. The standard
// library engines are portable but its distributions are not, so the
// uniform/normal/Poisson transforms are pinned here.
//
// Stream layout:
//   * master generator: xoshiro256** seeded through splitmix64;
//   * substream derivation: substream_seed(seed, j) =
//       sm(sm(seed) ^ j), where sm is one splitmix64 step.
// Work item j (trajectory, replicate, Monte Carlo draw, ...) always uses
// substream(seed, j), so results do not depend on scheduling.

namespace ppgof::rng {

struct splitmix64 {
    std::uint64_t state;

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};

inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
    splitmix64 outer{seed};
    splitmix64 inner{outer.next() ^ index};
    return inner.next();
}

class xoshiro256ss {
public:
    explicit xoshiro256ss(std::uint64_t seed) {
        splitmix64 sm{seed};
        for (auto& w : s_) w = sm.next();
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

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> s_;
};

class stream {
public:
    explicit stream(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_.next(); }

    // Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform01() {
        return (static_cast<double>(eng_.next() >> 11) + 0.5) * 0x1.0p-53;
    }

    // Standard normal by inverse-CDF transform (one uniform per draw).
    double normal() { return math::normal_quantile(uniform01()); }

    // Poisson by inversion chop-down; means above 60 are split using
    // Poisson additivity to keep exp(-mu) well scaled.
    long poisson(double mu) {
        long total = 0;
        while (mu > 60.0) {
            total += poisson_small(30.0);
            mu -= 30.0;
        }
        if (mu > 0.0) total += poisson_small(mu);
        return total;
    }

private:
    long poisson_small(double mu) {
        const double u = uniform01();
        double p = std::exp(-mu);
        double cum = p;
        long k = 0;
        while (u > cum && k < 100000) {
            ++k;
            p *= mu / static_cast<double>(k);
            cum += p;
        }
        return k;
    }

    xoshiro256ss eng_;
};

inline stream substream(std::uint64_t seed, std::uint64_t index) {
    return stream(substream_seed(seed, index));
}

}  // namespace ppgof::rng
