#pragma once

// Deterministic random number generation for the simulation engines.
// xoshiro256++ seeded through splitmix64; one independent stream per
// (seed, chunk) pair so that estimates are bit-identical for a fixed seed
// regardless of the number of worker threads.
//
// Normal deviates use explicit Box-Muller (no library distributions, whose
// streams are not pinned down by the standard).

#include <cmath>
#include <cstdint>

namespace bmlab::rng {

struct SplitMix64 {
    uint64_t state;

    explicit SplitMix64(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
};

class Xoshiro256pp {
public:
    Xoshiro256pp() : Xoshiro256pp(0x853C49E6748FEA9BULL) {}

    explicit Xoshiro256pp(uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& w : s_) w = sm.next();
        has_cached_normal_ = false;
    }

    // Independent stream for chunk `chunk` of a run seeded with `seed`.
    static Xoshiro256pp for_chunk(uint64_t seed, uint64_t chunk) {
        SplitMix64 sm(seed ^ (0xA0761D6478BD642FULL * (chunk + 1)));
        Xoshiro256pp g;
        for (auto& w : g.s_) w = sm.next();
        g.has_cached_normal_ = false;
        return g;
    }

    uint64_t next_u64() {
        const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform in (0, 1]; never returns 0 so logs are safe.
    double uniform() {
        return ((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Uniform in [0, 1).
    double uniform_co() { return (next_u64() >> 11) * 0x1.0p-53; }

    // Standard normal via Box-Muller (deterministic draw count: two
    // uniforms per pair).
    double normal() {
        if (has_cached_normal_) {
            has_cached_normal_ = false;
            return cached_normal_;
        }
        const double u1 = uniform();
        const double u2 = uniform_co();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.28318530717958647692 * u2;
        cached_normal_ = r * std::sin(a);
        has_cached_normal_ = true;
        return r * std::cos(a);
    }

    // Uniform point on the unit sphere of R^d (d = 2 or 3).
    void unit_vector(int d, double out[3]) {
        if (d == 2) {
            const double a = 6.28318530717958647692 * uniform_co();
            out[0] = std::cos(a);
            out[1] = std::sin(a);
            out[2] = 0.0;
        } else {
            const double z = 2.0 * uniform_co() - 1.0;
            const double a = 6.28318530717958647692 * uniform_co();
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            out[0] = r * std::cos(a);
            out[1] = r * std::sin(a);
            out[2] = z;
        }
    }

private:
    static uint64_t rotl(uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    uint64_t s_[4];
    double cached_normal_;
    bool has_cached_normal_;
};

}  // namespace bmlab::rng
