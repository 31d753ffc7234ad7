#pragma once

#include <cstdint>
#include <string_view>

#include "mphb/bucket_hash.hpp"
#include "mphb/fingerprint.hpp"
#include "mphb/gf2_hash.hpp"

namespace mphb {

enum class HashProviderMode : uint8_t {
    kProvable = 0,   // tabulated linear maps over GF(2)
    kHeuristic = 1,  // seeded non-cryptographic mixer, 96-bit fingerprints
};

// 96-bit seeded mixer for heuristic mode: the fingerprint body is lo plus
// the high word. No length limit and no lookup tables; a single 32-bit seed
// describes the whole map.
Fingerprint128 heuristic_fingerprint(std::string_view key, uint32_t seed);

// Heuristic replacement for the rho pair: two seeded mixes of the body.
HashPair heuristic_pair(Fingerprint128 body, uint32_t seed, uint64_t range);

// Everything needed to turn a key into a fingerprint and a fingerprint into
// a per-bucket hash pair, for either provider mode. Immutable once built;
// all evaluation paths are pure.
class HashProvider {
  public:
    HashProvider() = default;

    static HashProvider provable(uint64_t rng_seed, uint32_t max_key_bytes);
    static HashProvider heuristic(uint32_t body_seed);
    static HashProvider from_parts(LinearMapGf2 map, BucketHashTables tables);

    HashProviderMode mode() const noexcept { return mode_; }
    std::size_t record_size() const noexcept {
        return mode_ == HashProviderMode::kProvable ? 16 : 12;
    }

    Fingerprint128 fingerprint(std::string_view key) const;

    // Hash pair for a bucket of the given range, recomputed from scratch.
    HashPair pair(Fingerprint128 fp, uint32_t bucket_seed, uint64_t range) const;

    // Seed-independent precomputation plus the cheap per-seed step, used by
    // the seed search. In heuristic mode the basis just carries the body.
    PairBasis pair_basis(Fingerprint128 fp) const;
    HashPair pair_from_basis(const PairBasis& basis, uint32_t bucket_seed, uint64_t range) const;

    // Bucket seeds are drawn from [1, kPrime) in provable mode and from the
    // full nonzero 32-bit range in heuristic mode.
    uint32_t draw_bucket_seed(SplitMix64& rng) const;

    // Provable-mode parts (empty in heuristic mode).
    const LinearMapGf2& linear_map() const noexcept { return map_; }
    const BucketHashTables& bucket_tables() const noexcept { return tables_; }
    uint32_t body_seed() const noexcept { return body_seed_; }

    // Maximum key length this provider can fingerprint.
    uint64_t max_key_bytes() const noexcept;

  private:
    HashProviderMode mode_ = HashProviderMode::kProvable;
    LinearMapGf2 map_;
    BucketHashTables tables_;
    uint32_t body_seed_ = 0;
};

}  // namespace mphb
