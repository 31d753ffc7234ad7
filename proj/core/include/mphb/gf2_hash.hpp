#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "mphb/fingerprint.hpp"

namespace mphb {

// Rows of the matrix that are forced to zero so that bits 0 and 15 of every
// 16-bit lane come out zero. The high word (bits 96..127) is untouched.
inline constexpr uint64_t kLaneMaskLo = 0x7FFE7FFE7FFE7FFEull;
inline constexpr uint64_t kLaneMaskHi = 0xFFFFFFFF7FFE7FFEull;

// Random 128 x 8*max_key_bytes matrix over GF(2), evaluated by table lookup:
// the matrix is split into 8-column chunks and each chunk's 256 possible
// products are precomputed, so hashing XORs one table entry per key byte.
// Keys shorter than the maximum are implicitly zero-padded; padding
// contributes nothing because the image of zero is zero.
class LinearMapGf2 {
  public:
    LinearMapGf2() = default;

    // Deterministic in rng_seed. max_key_bytes >= 1.
    static LinearMapGf2 sample(uint64_t rng_seed, uint32_t max_key_bytes);

    // Rebuild from serialized tables (chunk-major, 256 entries per chunk).
    static LinearMapGf2 from_tables(uint32_t max_key_bytes, std::vector<Fingerprint128> tables);

    // h'(key) = A * key over GF(2). Throws KeyTooLongError.
    Fingerprint128 fingerprint(std::string_view key) const;

    uint32_t max_key_bytes() const noexcept { return max_key_bytes_; }
    std::span<const Fingerprint128> tables() const noexcept { return tables_; }

    // Column of the underlying matrix for bit index i of the key
    // (i = 8*byte + bit within byte, bits taken LSB-first). Only available
    // on sampled maps; used by tests to compare against naive evaluation.
    bool has_columns() const noexcept { return !columns_.empty(); }
    Fingerprint128 column(uint32_t bit_index) const { return columns_[bit_index]; }

  private:
    uint32_t max_key_bytes_ = 0;
    std::vector<Fingerprint128> tables_;   // max_key_bytes_ * 256
    std::vector<Fingerprint128> columns_;  // max_key_bytes_ * 8, empty when decoded
};

}  // namespace mphb
