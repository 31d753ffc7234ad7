#include "mphb/bucket_hash.hpp"

#include "mphb/errors.hpp"

namespace mphb {

BucketHashTables BucketHashTables::sample(uint64_t rng_seed) {
    BucketHashTables t;
    t.entries_.resize(kTableCount * kEntriesPerTable);
    SplitMix64 rng(derive_seed(rng_seed, 0x627563 /* "buc" */));
    for (auto& e : t.entries_) e = static_cast<uint32_t>(rng.uniform_below(kPrime));
    return t;
}

BucketHashTables BucketHashTables::from_raw(std::vector<uint32_t> entries) {
    BucketHashTables t;
    t.entries_ = std::move(entries);
    return t;
}

uint64_t rho(const BucketHashTables& tables, Fingerprint128 fp, uint32_t seed, unsigned delta) {
    uint64_t plain = 0;
    uint64_t scaled = 0;
    for (unsigned j = 1; j <= kLaneCount; ++j) {
        const uint32_t idx = fp.lane(j) ^ delta;
        plain += tables.entry(j - 1, idx);
        scaled += tables.entry(j - 1 + kLaneCount, idx);
    }
    return (plain % kPrime + uint64_t{seed} * (scaled % kPrime) % kPrime) % kPrime;
}

HashPair hash_pair(const BucketHashTables& tables, Fingerprint128 fp, uint32_t seed, uint64_t range) {
    return {static_cast<uint32_t>(rho(tables, fp, seed, 0) % range),
            static_cast<uint32_t>(rho(tables, fp, seed, 1) % range)};
}

PairBasis make_pair_basis(const BucketHashTables& tables, Fingerprint128 fp) {
    PairBasis basis{};
    for (unsigned delta = 0; delta < 2; ++delta) {
        uint64_t plain = 0;
        uint64_t scaled = 0;
        for (unsigned j = 1; j <= kLaneCount; ++j) {
            const uint32_t idx = fp.lane(j) ^ delta;
            plain += tables.entry(j - 1, idx);
            scaled += tables.entry(j - 1 + kLaneCount, idx);
        }
        basis.plain[delta] = plain % kPrime;
        basis.scaled[delta] = scaled % kPrime;
    }
    return basis;
}

SeedSearchResult find_seed(const BucketHashTables& tables,
                           std::span<const Fingerprint128> bucket, uint64_t range,
                           const std::function<bool(std::span<const HashPair>)>& acceptor,
                           SplitMix64& rng, uint32_t max_attempts) {
    std::vector<PairBasis> bases;
    bases.reserve(bucket.size());
    for (const auto& fp : bucket) bases.push_back(make_pair_basis(tables, fp));

    std::vector<HashPair> pairs(bucket.size());
    for (uint32_t attempt = 1; attempt <= max_attempts; ++attempt) {
        const uint32_t seed = static_cast<uint32_t>(1 + rng.uniform_below(kPrime - 1));
        for (std::size_t i = 0; i < bases.size(); ++i) pairs[i] = pair_from_basis(bases[i], seed, range);
        if (acceptor(pairs)) return {seed, attempt};
    }
    throw SeedSearchExhaustedError(max_attempts);
}

}  // namespace mphb
