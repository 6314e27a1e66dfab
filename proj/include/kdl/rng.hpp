#pragma once
/**
 * @file rng.hpp
 * @brief Small counter-seeded generators for per-particle random streams.
 *
 * Each particle owns a xoshiro256** state seeded by splitmix64 from
 * (seed, index), so results do not depend on how particles are split across
 * threads. Normals come from Box-Muller with the second variate cached.
 */

#include <cmath>
#include <cstdint>
#include <numbers>

namespace kdl {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

class Rng {
public:
    Rng() : Rng(0, 0) {}
    Rng(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t sm = seed ^ (0xD1B54A32D192ED03ULL * (stream + 1));
        for (auto& w : s_) w = splitmix64(sm);
    }

    std::uint64_t next_u64() {
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

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1].
    double uniform_open0() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

    double normal() {
        if (has_cached_) {
            has_cached_ = false;
            return cached_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_open0()));
        const double phi = 2.0 * std::numbers::pi * uniform();
        cached_ = r * std::sin(phi);
        has_cached_ = true;
        return r * std::cos(phi);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t s_[4];
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace kdl
