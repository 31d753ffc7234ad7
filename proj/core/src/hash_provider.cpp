#include "mphb/hash_provider.hpp"

#include <bit>
#include <cstring>
#include <limits>

namespace mphb {

Fingerprint128 heuristic_fingerprint(std::string_view key, uint32_t seed) {
    uint64_t a = mix64((uint64_t{seed} << 32) ^ key.size() ^ 0x2545F4914F6CDD1Dull);
    uint64_t b = mix64(a ^ 0x9E3779B97F4A7C15ull);
    std::size_t i = 0;
    for (; i + 8 <= key.size(); i += 8) {
        uint64_t chunk;
        std::memcpy(&chunk, key.data() + i, 8);
        a = mix64(a ^ chunk);
        b = mix64(b + std::rotl(chunk, 29));
    }
    if (i < key.size()) {
        uint64_t chunk = 0;
        std::memcpy(&chunk, key.data() + i, key.size() - i);
        a = mix64(a ^ chunk);
        b = mix64(b + std::rotl(chunk, 29));
    }
    Fingerprint128 fp;
    fp.lo = mix64(a ^ std::rotl(b, 32));
    fp.hi = (mix64(b ^ a) >> 32) << 32;  // high word only, low half stays zero
    return fp;
}

HashPair heuristic_pair(Fingerprint128 body, uint32_t seed, uint64_t range) {
    const uint64_t hw = body.high_word();
    HashPair out;
    for (unsigned delta = 0; delta < 2; ++delta) {
        uint64_t h = mix64(body.lo ^ mix64((uint64_t{seed} << 1) | delta));
        h = mix64(h ^ (hw * 0x9E3779B97F4A7C15ull));
        (delta == 0 ? out.first : out.second) = static_cast<uint32_t>(h % range);
    }
    return out;
}

HashProvider HashProvider::provable(uint64_t rng_seed, uint32_t max_key_bytes) {
    HashProvider p;
    p.mode_ = HashProviderMode::kProvable;
    p.map_ = LinearMapGf2::sample(rng_seed, max_key_bytes);
    p.tables_ = BucketHashTables::sample(rng_seed);
    return p;
}

HashProvider HashProvider::heuristic(uint32_t body_seed) {
    HashProvider p;
    p.mode_ = HashProviderMode::kHeuristic;
    p.body_seed_ = body_seed;
    return p;
}

HashProvider HashProvider::from_parts(LinearMapGf2 map, BucketHashTables tables) {
    HashProvider p;
    p.mode_ = HashProviderMode::kProvable;
    p.map_ = std::move(map);
    p.tables_ = std::move(tables);
    return p;
}

Fingerprint128 HashProvider::fingerprint(std::string_view key) const {
    return mode_ == HashProviderMode::kProvable ? map_.fingerprint(key)
                                                : heuristic_fingerprint(key, body_seed_);
}

HashPair HashProvider::pair(Fingerprint128 fp, uint32_t bucket_seed, uint64_t range) const {
    return mode_ == HashProviderMode::kProvable ? hash_pair(tables_, fp, bucket_seed, range)
                                                : heuristic_pair(fp, bucket_seed, range);
}

PairBasis HashProvider::pair_basis(Fingerprint128 fp) const {
    if (mode_ == HashProviderMode::kProvable) return make_pair_basis(tables_, fp);
    PairBasis basis{};
    basis.plain[0] = fp.lo;
    basis.scaled[0] = fp.hi;
    return basis;
}

HashPair HashProvider::pair_from_basis(const PairBasis& basis, uint32_t bucket_seed,
                                       uint64_t range) const {
    if (mode_ == HashProviderMode::kProvable) {
        return mphb::pair_from_basis(basis, bucket_seed, range);
    }
    Fingerprint128 body{basis.plain[0], basis.scaled[0]};
    return heuristic_pair(body, bucket_seed, range);
}

uint32_t HashProvider::draw_bucket_seed(SplitMix64& rng) const {
    if (mode_ == HashProviderMode::kProvable) {
        return static_cast<uint32_t>(1 + rng.uniform_below(kPrime - 1));
    }
    return static_cast<uint32_t>(1 + rng.uniform_below(0xFFFFFFFFull));
}

uint64_t HashProvider::max_key_bytes() const noexcept {
    return mode_ == HashProviderMode::kProvable ? map_.max_key_bytes()
                                                : std::numeric_limits<uint64_t>::max();
}

}  // namespace mphb
