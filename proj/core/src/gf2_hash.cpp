#include "mphb/gf2_hash.hpp"

#include <bit>

#include "mphb/errors.hpp"
#include "mphb/rng.hpp"

namespace mphb {

LinearMapGf2 LinearMapGf2::sample(uint64_t rng_seed, uint32_t max_key_bytes) {
    LinearMapGf2 map;
    map.max_key_bytes_ = max_key_bytes;
    map.columns_.resize(uint64_t{max_key_bytes} * 8);
    map.tables_.assign(uint64_t{max_key_bytes} * 256, Fingerprint128{});

    SplitMix64 rng(derive_seed(rng_seed, 0x676632 /* "gf2" */));
    for (auto& col : map.columns_) {
        col.lo = rng.next() & kLaneMaskLo;
        col.hi = rng.next() & kLaneMaskHi;
    }

    // Table entry for byte value v is the XOR of the chunk's columns selected
    // by the bits of v; entry 0 is forced to zero by linearity. Built
    // incrementally: entry[v] = entry[v without lowest bit] ^ column[lowest bit].
    for (uint32_t chunk = 0; chunk < max_key_bytes; ++chunk) {
        Fingerprint128* table = &map.tables_[uint64_t{chunk} * 256];
        const Fingerprint128* cols = &map.columns_[uint64_t{chunk} * 8];
        for (uint32_t v = 1; v < 256; ++v) {
            const uint32_t low = v & (0u - v);
            const uint32_t rest = v ^ low;
            const Fingerprint128& c = cols[std::countr_zero(low)];
            table[v].lo = table[rest].lo ^ c.lo;
            table[v].hi = table[rest].hi ^ c.hi;
        }
    }
    return map;
}

LinearMapGf2 LinearMapGf2::from_tables(uint32_t max_key_bytes, std::vector<Fingerprint128> tables) {
    LinearMapGf2 map;
    map.max_key_bytes_ = max_key_bytes;
    map.tables_ = std::move(tables);
    return map;
}

Fingerprint128 LinearMapGf2::fingerprint(std::string_view key) const {
    if (key.size() > max_key_bytes_) throw KeyTooLongError(key.size(), max_key_bytes_);
    Fingerprint128 fp;
    for (std::size_t i = 0; i < key.size(); ++i) {
        const Fingerprint128& e = tables_[i * 256 + static_cast<unsigned char>(key[i])];
        fp.lo ^= e.lo;
        fp.hi ^= e.hi;
    }
    return fp;
}

}  // namespace mphb
