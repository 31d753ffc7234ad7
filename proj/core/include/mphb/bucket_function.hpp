#pragma once

#include <cstdint>
#include <span>

#include "mphb/bitvec.hpp"
#include "mphb/graph.hpp"
#include "mphb/hash_provider.hpp"

namespace mphb {

enum class FunctionMode : uint8_t {
    kPhf = 0,   // injective into [0, 2*tau) per bucket
    kMphf = 1,  // bijective onto [0, n) per bucket
};

// Vertex count per graph side: ceil((1 + epsilon) * n), computed in exact
// integer arithmetic from epsilon in millionths so that builds are
// bit-reproducible.
constexpr uint64_t tau_for(uint64_t key_count, uint32_t epsilon_micro) noexcept {
    const unsigned __int128 scaled =
        static_cast<unsigned __int128>(key_count) * (1000000ull + epsilon_micro);
    return static_cast<uint64_t>((scaled + 999999) / 1000000);
}

// Hash function for one bucket (or for a whole key set in standalone mode).
// MPHF form stores the occupancy of the slot map plus the vertex labels
// packed down to the occupied slots; PHF form stores the raw labels and
// needs no rank structure.
class BucketFunction {
  public:
    BucketFunction() = default;

    uint64_t key_count() const noexcept { return key_count_; }
    uint32_t seed() const noexcept { return seed_; }
    uint64_t tau() const noexcept { return tau_; }
    bool empty() const noexcept { return key_count_ == 0; }

    const RankedBitVector& occupancy() const noexcept { return occupancy_; }
    const BitVec& select_packed() const noexcept { return select_packed_; }
    const BitVec& select_raw() const noexcept { return select_raw_; }

    // Slot of a hash pair: the pair's left vertex when the two label bits
    // agree, otherwise the (tau-offset) right vertex.
    uint64_t slot(HashPair pair, FunctionMode mode) const;

    // MPHF: rank of the slot, in [0, key_count). PHF: the slot itself.
    uint64_t evaluate(HashPair pair, FunctionMode mode) const;

    static BucketFunction from_parts(uint32_t seed, uint64_t key_count, uint64_t tau,
                                     FunctionMode mode, RankedBitVector occupancy,
                                     BitVec select_packed, BitVec select_raw);

  private:
    friend class BucketBuilder;

    uint64_t key_count_ = 0;
    uint64_t tau_ = 0;
    uint32_t seed_ = 0;
    RankedBitVector occupancy_;  // MPHF only
    BitVec select_packed_;       // MPHF only, key_count_ bits
    BitVec select_raw_;          // PHF only, 2*tau_ bits
};

struct BucketBuildSettings {
    uint32_t epsilon_micro = 45000;
    uint32_t kappa = 128;
    FunctionMode mode = FunctionMode::kMphf;
    uint32_t max_seed_attempts = kDefaultMaxSeedAttempts;
};

// Repeats seed -> graph -> acyclicity until a seed works, then derives the
// slot map and its payload. Scratch buffers persist across calls so building
// every bucket of a large set reuses one allocation footprint.
class BucketBuilder {
  public:
    explicit BucketBuilder(const HashProvider& provider) : provider_(&provider) {}

    // Throws DuplicateFingerprintError and SeedSearchExhaustedError.
    // attempts_out, when given, receives the number of seeds tried.
    BucketFunction build(std::span<const Fingerprint128> bucket,
                         const BucketBuildSettings& settings, SplitMix64& rng,
                         uint32_t* attempts_out = nullptr);

  private:
    const HashProvider* provider_;
    std::vector<PairBasis> bases_;
    std::vector<HashPair> pairs_;
    std::vector<Fingerprint128> sorted_;
    BipartiteGraph graph_;
    GraphLabeler labeler_;
};

}  // namespace mphb
