#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>

namespace popdyn {

// SplitMix64 step. Used for seeding and for deriving independent stream
// seeds; the generator algorithms are fixed here so that seeded runs are
// bit-identical across platforms (golden tests depend on this).
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Seed for substream `stream` of a master seed. Distinct streams are
// decorrelated by running the SplitMix64 mix on master + stream offset.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t s = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
    return splitmix64(s);
}

// xoshiro256++ with SplitMix64 seeding. Normal variates use Box-Muller
// (pair cached), so a stream's draw sequence is a pure function of its seed.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) {
        for (auto& w : state_) w = splitmix64(seed);
        cached_ = false;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on (0, 1]; never 0, so log(u) is always finite.
    double uniform01() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    double normal() {
        if (cached_) {
            cached_ = false;
            return cache_;
        }
        const double u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * M_PI * u2;
        cache_ = r * std::sin(a);
        cached_ = true;
        return r * std::cos(a);
    }

    double exponential(double rate) { return -std::log(uniform01()) / rate; }

    // Index i with probability weights[i]/total. Caller guarantees
    // total == sum(weights) up to roundoff and total > 0.
    int categorical(std::span<const double> weights, double total) {
        double u = uniform01() * total;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            u -= weights[i];
            if (u <= 0.0) return static_cast<int>(i);
        }
        return static_cast<int>(weights.size()) - 1;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_;
    double cache_ = 0.0;
    bool cached_ = false;
};

}  // namespace popdyn
