#pragma once

#include <compare>
#include <cstdint>
#include <cstring>

namespace mphb {

// Number of 16-bit lanes feeding the per-bucket hash pair.
inline constexpr unsigned kLaneCount = 6;

// 128-bit image of a key. Bits 96..127 form the high word that routes a key
// to its bucket; bits 0..95 are six 16-bit lanes indexing the per-bucket
// hash tables. In provable mode bits 0 and 15 of every lane are forced to
// zero by the sampling of the linear map. In heuristic mode the 96-bit body
// occupies lo and the high word, and hi's low 32 bits stay zero.
struct Fingerprint128 {
    uint64_t lo = 0;  // fingerprint bits 0..63 (lanes 1..4)
    uint64_t hi = 0;  // fingerprint bits 64..127 (lanes 5..6, then the high word)

    friend constexpr auto operator<=>(const Fingerprint128&, const Fingerprint128&) = default;

    constexpr uint32_t high_word() const noexcept { return static_cast<uint32_t>(hi >> 32); }

    // j in [1, kLaneCount]
    constexpr uint32_t lane(unsigned j) const noexcept {
        return j <= 4 ? static_cast<uint32_t>((lo >> (16 * (j - 1))) & 0xFFFF)
                      : static_cast<uint32_t>((hi >> (16 * (j - 5))) & 0xFFFF);
    }
};

// The b most significant bits of the high word. b = 0 (single bucket) maps
// everything to bucket 0.
constexpr uint32_t bucket_index(Fingerprint128 fp, unsigned b) noexcept {
    return b == 0 ? 0 : fp.high_word() >> (32 - b);
}

// Spill-record byte layout, little-endian. Provable records are 16 bytes
// (lo, hi); heuristic records are 12 bytes (lo, high word).
inline void store_record(const Fingerprint128& fp, unsigned char* out, std::size_t record_size) noexcept {
    std::memcpy(out, &fp.lo, 8);
    if (record_size == 16) {
        std::memcpy(out + 8, &fp.hi, 8);
    } else {
        const uint32_t hw = fp.high_word();
        std::memcpy(out + 8, &hw, 4);
    }
}

inline Fingerprint128 load_record(const unsigned char* in, std::size_t record_size) noexcept {
    Fingerprint128 fp;
    std::memcpy(&fp.lo, in, 8);
    if (record_size == 16) {
        std::memcpy(&fp.hi, in + 8, 8);
    } else {
        uint32_t hw;
        std::memcpy(&hw, in + 8, 4);
        fp.hi = static_cast<uint64_t>(hw) << 32;
    }
    return fp;
}

}  // namespace mphb
