#include "mphb/bucket_function.hpp"

#include <algorithm>
#include <cassert>

#include "mphb/errors.hpp"

namespace mphb {

uint64_t BucketFunction::slot(HashPair pair, FunctionMode mode) const {
    const uint64_t l = pair.first;
    const uint64_t r = tau_ + pair.second;
    if (mode == FunctionMode::kPhf) {
        return select_raw_.get(l) == select_raw_.get(r) ? l : r;
    }
    const bool bl = occupancy_.bits().get(l) && select_packed_.get(occupancy_.rank1(l));
    const bool br = occupancy_.bits().get(r) && select_packed_.get(occupancy_.rank1(r));
    return bl == br ? l : r;
}

uint64_t BucketFunction::evaluate(HashPair pair, FunctionMode mode) const {
    if (mode == FunctionMode::kPhf) return slot(pair, mode);
    const uint64_t l = pair.first;
    const uint64_t r = tau_ + pair.second;
    const uint64_t rank_l = occupancy_.rank1(l);
    const uint64_t rank_r = occupancy_.rank1(r);
    const bool bl = occupancy_.bits().get(l) && select_packed_.get(rank_l);
    const bool br = occupancy_.bits().get(r) && select_packed_.get(rank_r);
    return bl == br ? rank_l : rank_r;
}

BucketFunction BucketFunction::from_parts(uint32_t seed, uint64_t key_count, uint64_t tau,
                                          FunctionMode mode, RankedBitVector occupancy,
                                          BitVec select_packed, BitVec select_raw) {
    BucketFunction f;
    f.seed_ = seed;
    f.key_count_ = key_count;
    f.tau_ = tau;
    if (mode == FunctionMode::kMphf) {
        f.occupancy_ = std::move(occupancy);
        f.select_packed_ = std::move(select_packed);
    } else {
        f.select_raw_ = std::move(select_raw);
    }
    return f;
}

BucketFunction BucketBuilder::build(std::span<const Fingerprint128> bucket,
                                    const BucketBuildSettings& settings, SplitMix64& rng,
                                    uint32_t* attempts_out) {
    BucketFunction f;
    if (attempts_out) *attempts_out = 0;
    if (bucket.empty()) return f;

    // Identical fingerprints produce a repeated edge under every seed, so
    // they are rejected up front rather than exhausting the seed search.
    sorted_.assign(bucket.begin(), bucket.end());
    std::sort(sorted_.begin(), sorted_.end());
    for (std::size_t i = 1; i < sorted_.size(); ++i) {
        if (sorted_[i] == sorted_[i - 1]) {
            throw DuplicateFingerprintError(sorted_[i].lo, sorted_[i].hi);
        }
    }

    const uint64_t n = bucket.size();
    const uint64_t tau = tau_for(n, settings.epsilon_micro);

    bases_.clear();
    bases_.reserve(n);
    for (const auto& fp : bucket) bases_.push_back(provider_->pair_basis(fp));

    pairs_.resize(n);
    graph_.tau = tau;
    BitVec select;
    uint32_t seed = 0;
    uint32_t attempts = 0;
    for (;;) {
        if (attempts >= settings.max_seed_attempts) {
            throw SeedSearchExhaustedError(settings.max_seed_attempts);
        }
        ++attempts;
        seed = provider_->draw_bucket_seed(rng);
        graph_.edges.clear();
        for (std::size_t i = 0; i < bases_.size(); ++i) {
            pairs_[i] = provider_->pair_from_basis(bases_[i], seed, tau);
            graph_.edges.push_back(
                {pairs_[i].first, static_cast<uint32_t>(tau + pairs_[i].second)});
        }
        if (labeler_.label(graph_, select)) break;
    }
    if (attempts_out) *attempts_out = attempts;

    BitVec occupancy(2 * tau);
    for (const auto& [f0, f1] : pairs_) {
        const uint64_t l = f0;
        const uint64_t r = tau + f1;
        const uint64_t v = select.get(l) == select.get(r) ? l : r;
        assert(!occupancy.get(v) && "slot map must be injective on an acyclic graph");
        occupancy.set(v);
    }

    f.seed_ = seed;
    f.key_count_ = n;
    f.tau_ = tau;
    if (settings.mode == FunctionMode::kPhf) {
        f.select_raw_ = std::move(select);
        return f;
    }

    // Pack the labels of occupied slots, in slot order; the k-th packed bit
    // belongs to the slot of rank k.
    BitVec packed(n);
    uint64_t rank = 0;
    for (uint64_t v = 0; v < 2 * tau; ++v) {
        if (!occupancy.get(v)) continue;
        if (select.get(v)) packed.set(rank);
        ++rank;
    }
    assert(rank == n);

    f.occupancy_ = build_rank(std::move(occupancy), settings.kappa);
    f.select_packed_ = std::move(packed);
    return f;
}

}  // namespace mphb
