#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace perp {

// Stateless avalanche mix (splitmix64 finalizer).
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// xoshiro256++ with splitmix64 seeding. Samplers take an explicit stream;
// there is no hidden global state. Substreams are derived by mixing
// (master_seed, index), so the partition of work to streams is a pure
// function of the indices and results do not depend on thread count.
class RandomStream {
  public:
    explicit RandomStream(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) {
            x += 0x9E3779B97F4A7C15ULL;
            word = mix64(x);
        }
        if (state_[0] == 0 && state_[1] == 0 && state_[2] == 0 && state_[3] == 0) state_[0] = 1;
    }

    static RandomStream substream(std::uint64_t master_seed, std::uint64_t index) {
        return RandomStream(mix64(master_seed ^ mix64(index + 0x632BE59BD9B4E019ULL)));
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

    // Uniform on [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1].
    double next_open_double() { return 1.0 - next_double(); }

    // Standard normal via Box-Muller; consumes exactly two u64 draws.
    double next_normal() {
        const double u1 = next_open_double();
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // Exponential with unit rate.
    double next_exponential() { return -std::log(next_open_double()); }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::array<std::uint64_t, 4> state_;
};

}  // namespace perp
