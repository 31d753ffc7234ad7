#include "mphb/bitvec.hpp"

#include <array>

namespace mphb {

namespace {

std::array<uint8_t, 1 << 16> make_popcount16() {
    std::array<uint8_t, 1 << 16> t{};
    for (uint32_t v = 1; v < t.size(); ++v) t[v] = t[v >> 1] + (v & 1);
    return t;
}

}  // namespace

const uint8_t* popcount16_table() {
    static const std::array<uint8_t, 1 << 16> table = make_popcount16();
    return table.data();
}

uint64_t count_ones(const BitVec& bits, uint64_t from, uint64_t to) {
    const uint8_t* table = popcount16_table();
    const auto words = bits.words();
    uint64_t count = 0;
    uint64_t pos = from;
    while (pos < to) {
        // Width of the 16-bit-aligned chunk containing pos, clipped to [from, to).
        const uint64_t chunk_start = pos & ~uint64_t{15};
        const uint64_t chunk_end = chunk_start + 16 < to ? chunk_start + 16 : to;
        uint16_t chunk = static_cast<uint16_t>(words[chunk_start >> 6] >> (chunk_start & 63));
        // Mask off bits below pos and at or above chunk_end.
        chunk &= static_cast<uint16_t>(0xFFFFu << (pos - chunk_start));
        if (chunk_end - chunk_start < 16) {
            chunk &= static_cast<uint16_t>((1u << (chunk_end - chunk_start)) - 1);
        }
        count += table[chunk];
        pos = chunk_end;
    }
    return count;
}

uint64_t RankedBitVector::rank1(uint64_t i) const {
    uint64_t j = kappa_ ? i / kappa_ : 0;
    if (j >= samples_.size()) j = samples_.size() - 1;
    const uint64_t base = j * kappa_;
    return samples_[j] + count_ones(bits_, base, i);
}

RankedBitVector build_rank(BitVec bits, uint32_t kappa) {
    const uint64_t size = bits.size();
    std::vector<uint64_t> samples(size / kappa + 1);
    uint64_t acc = 0;
    samples[0] = 0;
    for (uint64_t j = 1; j < samples.size(); ++j) {
        acc += count_ones(bits, (j - 1) * uint64_t{kappa}, j * uint64_t{kappa});
        samples[j] = acc;
    }
    return RankedBitVector(std::move(bits), kappa, std::move(samples));
}

}  // namespace mphb
