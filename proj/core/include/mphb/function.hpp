#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "mphb/bucket_function.hpp"
#include "mphb/hash_provider.hpp"

namespace mphb {

// A built perfect (or minimal perfect) hash function: the hash provider
// state, the per-bucket functions and the offset array composing them.
//
// MPHF mode maps the build keys bijectively onto [0, key_count()):
//   p(x) = rank of x within its bucket + offsets[bucket(x)]
// PHF mode maps them injectively into [0, output_range()), each bucket
// occupying a 2*tau-wide band starting at its base.
class PerfectHashFunction {
  public:
    PerfectHashFunction() = default;

    static PerfectHashFunction from_parts(FunctionMode mode, HashProvider provider,
                                          uint32_t bucket_bits, uint32_t epsilon_micro,
                                          uint32_t kappa, std::vector<uint64_t> offsets,
                                          std::vector<BucketFunction> buckets);

    FunctionMode mode() const noexcept { return mode_; }
    const HashProvider& provider() const noexcept { return provider_; }
    uint32_t bucket_bits() const noexcept { return bucket_bits_; }
    uint32_t epsilon_micro() const noexcept { return epsilon_micro_; }
    uint32_t kappa() const noexcept { return kappa_; }
    uint64_t key_count() const noexcept { return offsets_.empty() ? 0 : offsets_.back(); }

    // offsets()[i] = number of keys in buckets before bucket i;
    // size is bucket count + 1.
    const std::vector<uint64_t>& offsets() const noexcept { return offsets_; }
    const std::vector<BucketFunction>& buckets() const noexcept { return buckets_; }

    // PHF only: band start per bucket (prefix sums of 2*tau), size
    // bucket count + 1.
    const std::vector<uint64_t>& phf_bases() const noexcept { return phf_bases_; }

    // One above the largest possible output: key_count() for MPHF,
    // the sum of the bucket bands for PHF.
    uint64_t output_range() const noexcept;

    // Keys from the build set get their perfect hash value; any other key
    // gets an arbitrary in-range value. Throws KeyTooLongError in provable
    // mode for keys longer than the sampled maximum.
    uint64_t evaluate(std::string_view key) const;
    uint64_t evaluate(Fingerprint128 fp) const;

  private:
    FunctionMode mode_ = FunctionMode::kMphf;
    HashProvider provider_;
    uint32_t bucket_bits_ = 0;
    uint32_t epsilon_micro_ = 45000;
    uint32_t kappa_ = 128;
    std::vector<uint64_t> offsets_;
    std::vector<BucketFunction> buckets_;
    std::vector<uint64_t> phf_bases_;
};

}  // namespace mphb
