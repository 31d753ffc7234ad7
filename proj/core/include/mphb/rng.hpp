#pragma once

#include <cstdint>

namespace mphb {

// Stafford variant 13 finalizer. Full-avalanche 64-bit mix.
constexpr uint64_t mix64(uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// splitmix64. Used for all randomness in the library so that builds are
// reproducible across platforms and standard library versions
// (std::uniform_int_distribution is implementation-defined).
class SplitMix64 {
  public:
    explicit SplitMix64(uint64_t seed) noexcept : state_(seed) {}

    uint64_t next() noexcept {
        state_ += 0x9E3779B97F4A7C15ull;
        uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    // Unbiased value in [0, bound) via rejection sampling. bound > 0.
    uint64_t uniform_below(uint64_t bound) noexcept {
        const uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
        for (;;) {
            const uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

  private:
    uint64_t state_;
};

// Deterministic derivation of an independent stream from (seed, stream id).
constexpr uint64_t derive_seed(uint64_t seed, uint64_t stream) noexcept {
    return mix64(seed ^ mix64(stream + 0x9E3779B97F4A7C15ull));
}

}  // namespace mphb
