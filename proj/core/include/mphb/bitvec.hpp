#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace mphb {

// Bit vector packed LSB-first into 64-bit words. Bit i lives in word i/64
// at position i%64, matching the serialized layout.
class BitVec {
  public:
    BitVec() = default;
    explicit BitVec(uint64_t size) : words_((size + 63) / 64, 0), size_(size) {}
    BitVec(std::vector<uint64_t> words, uint64_t size) : words_(std::move(words)), size_(size) {}

    uint64_t size() const noexcept { return size_; }
    bool empty() const noexcept { return size_ == 0; }

    bool get(uint64_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1; }
    void set(uint64_t i) noexcept { words_[i >> 6] |= uint64_t{1} << (i & 63); }
    void clear(uint64_t i) noexcept { words_[i >> 6] &= ~(uint64_t{1} << (i & 63)); }
    void assign(uint64_t i, bool v) noexcept { v ? set(i) : clear(i); }

    std::span<const uint64_t> words() const noexcept { return words_; }
    std::span<uint64_t> words() noexcept { return words_; }

    friend bool operator==(const BitVec&, const BitVec&) = default;

  private:
    std::vector<uint64_t> words_;
    uint64_t size_ = 0;
};

// Shared 2^16-entry popcount table; one byte per entry, built on first use.
// This is the reference path for counting ones during rank queries.
const uint8_t* popcount16_table();

// Number of set bits in positions [from, to), counted through the 16-bit
// lookup table in at most ceil((to-from)/16)+1 lookups.
uint64_t count_ones(const BitVec& bits, uint64_t from, uint64_t to);

// Bit vector with sampled cumulative ranks: samples[j] holds the number of
// ones strictly before position j*kappa.
class RankedBitVector {
  public:
    RankedBitVector() = default;
    RankedBitVector(BitVec bits, uint32_t kappa, std::vector<uint64_t> samples)
        : bits_(std::move(bits)), kappa_(kappa), samples_(std::move(samples)) {}

    const BitVec& bits() const noexcept { return bits_; }
    uint32_t kappa() const noexcept { return kappa_; }
    std::span<const uint64_t> samples() const noexcept { return samples_; }
    uint64_t size() const noexcept { return bits_.size(); }

    // Number of ones in positions [0, i). 0 <= i <= size().
    uint64_t rank1(uint64_t i) const;

  private:
    BitVec bits_;
    uint32_t kappa_ = 0;
    std::vector<uint64_t> samples_;
};

// Computes the sample array in one linear pass. kappa >= 1.
RankedBitVector build_rank(BitVec bits, uint32_t kappa);

}  // namespace mphb
