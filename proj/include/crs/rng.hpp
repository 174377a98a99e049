#pragma once

// Deterministic random-number core. Every stream in the library is a pure
// function of a 64-bit seed; seeds for sub-streams are derived with
// derive_seed() so that distinct (level, kind, trial) tuples get distinct,
// decorrelated streams. The exact algorithms (splitmix64, xoshiro256++,
// polar Gaussian) are documented in docs/FORMATS.md so that other
// implementations can reproduce the byte-exact outputs.

#include <array>
#include <cmath>
#include <cstdint>

namespace crs {

inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    return mix64(state);
}

/// Stream roles used when deriving sub-seeds.
enum class StreamKind : std::uint64_t {
    process_noise = 1,      // per-level drive noise added to the concealed data
    observation_noise = 2,  // per-level noise coupling one cascade stage to the next
    key_stream = 3,         // per-level secret key stream
    word = 4,               // random bit words in the trial harness
    attack = 5,             // attacker-side draws (guesses, injected noise)
};

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t level,
                                 StreamKind kind, std::uint64_t trial) {
    std::uint64_t h = mix64(root + 0x9E3779B97F4A7C15ULL);
    h = mix64(h + level + 0x9E3779B97F4A7C15ULL);
    h = mix64(h + static_cast<std::uint64_t>(kind) + 0x9E3779B97F4A7C15ULL);
    h = mix64(h + trial + 0x9E3779B97F4A7C15ULL);
    return h;
}

/// xoshiro256++ engine seeded from a single 64-bit value via splitmix64.
/// Value type: copying an engine forks the stream, which is the supported
/// way to run trials in parallel.
class Xoshiro256pp {
  public:
    explicit Xoshiro256pp(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
        bool all_zero = true;
        for (auto word : state_) all_zero &= (word == 0);
        if (all_zero) state_[0] = 1;
    }

    std::uint64_t next() {
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

    /// Uniform double in [0, 1) with 53 random bits.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::array<std::uint64_t, 4> state_{};
};

/// Standard normal sampler using the Marsaglia polar method on top of
/// xoshiro256++. Draws come in pairs; the spare is cached.
class GaussianSampler {
  public:
    explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * rng_.next_unit() - 1.0;
            v = 2.0 * rng_.next_unit() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        has_spare_ = true;
        return u * m;
    }

  private:
    Xoshiro256pp rng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace crs
