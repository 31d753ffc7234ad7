#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>

#include "mphb/function.hpp"

namespace mphb {

// Function image, little-endian throughout, bit vectors packed LSB-first
// within bytes. Layout:
//
//   header (48 bytes)
//     0   magic "MPHB"
//     4   u32 format version (1)
//     8   u8  mode (0 = PHF, 1 = MPHF)
//     9   u8  provider (0 = provable, 1 = heuristic)
//     10  u16 reserved (0)
//     12  u32 bucket bits b
//     16  u64 key count n
//     24  u32 epsilon in millionths
//     28  u32 kappa
//     32  u32 maximum key bytes
//     36  u32 heuristic body seed (0 in provable mode)
//     40  u64 reserved (0)
//   if n > 0:
//     provider section
//       provable:  max_key_bytes*256 linear-map entries of 16 bytes (lo, hi),
//                  then 12*65536 u32 bucket-table entries
//       heuristic: empty (the seed lives in the header)
//     offsets section
//       2^b packed entries offsets[1..2^b]; entry width is the narrowest of
//       8/16/32/64 bits that holds n (offsets[0] = 0 is implicit)
//     buckets section, per bucket with n_i > 0, byte-aligned
//       u32 bucket seed
//       MPHF: occupancy bits (2*tau_i), packed labels (n_i bits), then
//             rank-sample deltas, one per kappa-aligned position after the
//             first, each at most kappa (1 byte if kappa < 256, else 2)
//       PHF:  raw label bits (2*tau_i)
//   trailer
//     u64 FNV-1a hash of every preceding byte
//
// tau_i and all bit counts are derived from the offsets, so buckets carry no
// explicit size fields.
inline constexpr std::array<unsigned char, 4> kImageMagic{'M', 'P', 'H', 'B'};
inline constexpr uint32_t kImageVersion = 1;

struct EncodeReport {
    uint64_t total_bytes = 0;     // header + provider + payload + trailer
    uint64_t provider_bytes = 0;  // fixed tables
    uint64_t payload_bytes = 0;   // offsets + buckets

    double bits_per_key(uint64_t key_count) const {
        return key_count ? double(payload_bytes) * 8.0 / double(key_count) : 0.0;
    }
    double bits_per_key_with_tables(uint64_t key_count) const {
        return key_count ? double(payload_bytes + provider_bytes) * 8.0 / double(key_count) : 0.0;
    }
};

// Writes the image; the stream need not be seekable. Throws IoError.
EncodeReport encode(const PerfectHashFunction& function, std::ostream& out);

// Reads an image back into an equivalent function. Throws FormatError with
// the failing byte offset on bad magic, version, truncation or checksum
// mismatch.
PerfectHashFunction decode(std::istream& in);

}  // namespace mphb
