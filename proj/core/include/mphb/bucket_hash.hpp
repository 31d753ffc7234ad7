#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "mphb/fingerprint.hpp"
#include "mphb/rng.hpp"

namespace mphb {

// Largest 32-bit prime.
inline constexpr uint64_t kPrime = 4294967291ull;

// Per-bucket pair of hash values into [0, range).
using HashPair = std::pair<uint32_t, uint32_t>;

// Twelve tables of 2^16 random values below kPrime. Tables 0..5 feed the
// plain sum, tables 6..11 the seed-scaled sum; lane j indexes tables j and
// j+6. Full 16-bit indexing even though lane values are even: the delta
// toggle reaches the odd entries.
class BucketHashTables {
  public:
    static constexpr std::size_t kTableCount = 2 * kLaneCount;
    static constexpr std::size_t kEntriesPerTable = 1u << 16;

    BucketHashTables() = default;

    static BucketHashTables sample(uint64_t rng_seed);
    static BucketHashTables from_raw(std::vector<uint32_t> entries);

    uint32_t entry(unsigned table, uint32_t index) const {
        return entries_[table * kEntriesPerTable + index];
    }
    std::span<const uint32_t> raw() const noexcept { return entries_; }
    bool empty() const noexcept { return entries_.empty(); }

  private:
    std::vector<uint32_t> entries_;  // kTableCount * kEntriesPerTable
};

// rho(x, s, delta): sum of the plain-table entries plus s times the sum of
// the scaled-table entries, all indexed by lane xor delta, reduced mod
// kPrime. Exact in 64-bit arithmetic because both factors of the product
// are below kPrime and kPrime^2 < 2^64.
uint64_t rho(const BucketHashTables& tables, Fingerprint128 fp, uint32_t seed, unsigned delta);

// (rho(fp,s,0) mod range, rho(fp,s,1) mod range). range >= 1.
HashPair hash_pair(const BucketHashTables& tables, Fingerprint128 fp, uint32_t seed, uint64_t range);

// Seed-independent part of rho for one key: the two table sums per delta,
// already reduced mod kPrime. Precomputing these makes each seed attempt a
// multiply-add per key instead of 24 table lookups.
struct PairBasis {
    uint64_t plain[2];   // sum over tables 0..5, delta 0 and 1
    uint64_t scaled[2];  // sum over tables 6..11, delta 0 and 1
};

PairBasis make_pair_basis(const BucketHashTables& tables, Fingerprint128 fp);

inline HashPair pair_from_basis(const PairBasis& basis, uint32_t seed, uint64_t range) {
    const uint64_t r0 = (basis.plain[0] + uint64_t{seed} * basis.scaled[0] % kPrime) % kPrime;
    const uint64_t r1 = (basis.plain[1] + uint64_t{seed} * basis.scaled[1] % kPrime) % kPrime;
    return {static_cast<uint32_t>(r0 % range), static_cast<uint32_t>(r1 % range)};
}

struct SeedSearchResult {
    uint32_t seed = 0;
    uint32_t attempts = 0;
};

inline constexpr uint32_t kDefaultMaxSeedAttempts = 1000;

// Draws random seeds from [1, kPrime) until the acceptor approves the hash
// pairs they induce on the bucket. The acceptor sees one pair per
// fingerprint, in input order. Throws SeedSearchExhaustedError.
SeedSearchResult find_seed(const BucketHashTables& tables,
                           std::span<const Fingerprint128> bucket, uint64_t range,
                           const std::function<bool(std::span<const HashPair>)>& acceptor,
                           SplitMix64& rng, uint32_t max_attempts = kDefaultMaxSeedAttempts);

}  // namespace mphb
