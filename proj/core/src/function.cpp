#include "mphb/function.hpp"

namespace mphb {

PerfectHashFunction PerfectHashFunction::from_parts(FunctionMode mode, HashProvider provider,
                                                    uint32_t bucket_bits, uint32_t epsilon_micro,
                                                    uint32_t kappa, std::vector<uint64_t> offsets,
                                                    std::vector<BucketFunction> buckets) {
    PerfectHashFunction f;
    f.mode_ = mode;
    f.provider_ = std::move(provider);
    f.bucket_bits_ = bucket_bits;
    f.epsilon_micro_ = epsilon_micro;
    f.kappa_ = kappa;
    f.offsets_ = std::move(offsets);
    f.buckets_ = std::move(buckets);
    if (mode == FunctionMode::kPhf) {
        f.phf_bases_.resize(f.buckets_.size() + 1);
        f.phf_bases_[0] = 0;
        for (std::size_t i = 0; i < f.buckets_.size(); ++i) {
            f.phf_bases_[i + 1] = f.phf_bases_[i] + 2 * f.buckets_[i].tau();
        }
    }
    return f;
}

uint64_t PerfectHashFunction::output_range() const noexcept {
    if (mode_ == FunctionMode::kMphf) return key_count();
    return phf_bases_.empty() ? 0 : phf_bases_.back();
}

uint64_t PerfectHashFunction::evaluate(std::string_view key) const {
    if (key_count() == 0) return 0;  // nothing was built, so any value works
    return evaluate(provider_.fingerprint(key));
}

uint64_t PerfectHashFunction::evaluate(Fingerprint128 fp) const {
    if (buckets_.empty()) return 0;  // n = 0 function
    const uint32_t i = bucket_index(fp, bucket_bits_);
    const BucketFunction& bucket = buckets_[i];
    if (bucket.empty()) return 0;  // no keys routed here during the build
    const HashPair pair = provider_.pair(fp, bucket.seed(), bucket.tau());
    const uint64_t local = bucket.evaluate(pair, mode_);
    return (mode_ == FunctionMode::kMphf ? offsets_[i] : phf_bases_[i]) + local;
}

}  // namespace mphb
