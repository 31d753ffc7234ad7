#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "mphb/function.hpp"

namespace mphb {

// Smallest accepted fingerprint-buffer budget: room for one block of at
// least 64Ki provable records plus per-run read buffers.
inline constexpr uint64_t kMemoryFloor = 1ull << 20;

struct BuildConfig {
    uint64_t memory_budget = 200ull << 20;  // bytes of fingerprint buffer (mu)
    uint32_t max_bucket_size = 256;         // ell
    uint32_t bucket_bits = 0;               // 0 = choose from the key count
    uint32_t epsilon_micro = 45000;         // graph sparsity, millionths
    uint32_t kappa = 128;                   // rank sampling interval
    FunctionMode mode = FunctionMode::kMphf;
    HashProviderMode provider = HashProviderMode::kProvable;
    uint32_t max_key_bytes = 65;
    std::filesystem::path workdir;  // empty: system temp directory
    uint64_t rng_seed = 1;
    bool keep_spills = false;
    uint32_t max_seed_attempts = kDefaultMaxSeedAttempts;

    void validate() const;  // throws ConfigError
};

// Default bucket-bit count for a key set: a table of empirically calibrated
// anchor points interpolated on log2(n), shifted when the bucket capacity
// differs from 256. Grows by one bit per doubling past the last anchor.
uint32_t choose_bucket_bits(uint64_t key_count, uint32_t max_bucket_size = 256);

// Pull-based key iterator. Returned views stay valid until the next call.
class KeySource {
  public:
    virtual ~KeySource() = default;
    virtual bool next(std::string_view& key) = 0;
    virtual void reset() = 0;
    // 1-based input line of the key last returned, 0 when not line-oriented.
    virtual uint64_t line() const { return 0; }
};

// Newline-delimited key file: keys are raw bytes, split on 0x0A only.
// Empty lines and NUL bytes are rejected with the offending line number.
// Reads through its own block buffer; returned views point into it and
// stay valid until the next call.
class FileKeySource final : public KeySource {
  public:
    explicit FileKeySource(std::filesystem::path path);
    bool next(std::string_view& key) override;
    void reset() override;
    uint64_t line() const override { return line_; }

  private:
    void refill();

    std::filesystem::path path_;
    std::ifstream in_;
    std::vector<char> buffer_;
    std::size_t pos_ = 0;
    std::size_t len_ = 0;
    bool exhausted_ = false;
    std::string pending_;  // partial line carried across refills
    uint64_t line_ = 0;
};

class SpanKeySource final : public KeySource {
  public:
    explicit SpanKeySource(const std::vector<std::string>& keys) : keys_(&keys) {}
    bool next(std::string_view& key) override {
        if (index_ >= keys_->size()) return false;
        key = (*keys_)[index_++];
        return true;
    }
    void reset() override { index_ = 0; }
    uint64_t line() const override { return index_; }

  private:
    const std::vector<std::string>* keys_;
    std::size_t index_ = 0;
};

// One sorted run of fingerprint records: a spill file, or the final block
// that is kept in memory instead of being written and read back. The
// in-memory run stays in arrival order with the sorting permutation held
// separately, so no block-sized shuffle is ever paid for it.
struct SpillRun {
    std::filesystem::path path;         // empty for the in-memory run
    std::vector<unsigned char> memory;  // populated for the in-memory run
    std::vector<uint32_t> order;        // sorted position -> record index
    uint64_t record_count = 0;

    // k-th record of the run in bucket order (in-memory runs only).
    const unsigned char* record(uint64_t k, std::size_t record_size) const {
        return memory.data() + uint64_t{order[k]} * record_size;
    }
};

// All runs of one partitioning pass. Owns the spill files: they are removed
// on destruction unless keep is set.
struct SpillFileSet {
    std::vector<SpillRun> runs;
    std::size_t record_size = 16;
    uint64_t total_records = 0;
    uint64_t disk_files = 0;
    bool keep = false;
    std::filesystem::path cleanup_dir;  // removed when emptied, if set

    SpillFileSet() = default;
    SpillFileSet(SpillFileSet&&) noexcept = default;
    SpillFileSet& operator=(SpillFileSet&&) noexcept = default;
    SpillFileSet(const SpillFileSet&) = delete;
    SpillFileSet& operator=(const SpillFileSet&) = delete;
    ~SpillFileSet();
};

// Reads keys in blocks that fill the memory budget, fingerprints them,
// clusters each block by bucket index with a stable indirect counting sort,
// and dumps every block but the last to workdir/run-<j>.spill.
SpillFileSet partition_step(KeySource& source, const HashProvider& provider,
                            const BuildConfig& config, uint32_t bucket_bits);

// Streams buckets out of a spill set in increasing bucket order, merging the
// runs through a min-heap keyed on the head record's bucket index. Each run
// gets a read buffer of memory_budget / run_count bytes.
class BucketStream {
  public:
    BucketStream(const SpillFileSet& spill, uint64_t memory_budget, uint32_t bucket_bits);
    ~BucketStream();

    // Fingerprints of bucket `index`, possibly none. Call with consecutive
    // indices 0, 1, ..., 2^b - 1.
    void read_bucket(uint32_t index, std::vector<Fingerprint128>& out);

  private:
    struct Reader;
    std::vector<std::unique_ptr<Reader>> readers_;
    std::vector<uint32_t> heap_;  // reader indices, min-heap by (bucket, reader)
    uint32_t bucket_bits_;

    void heap_push(uint32_t reader);
    uint32_t heap_pop();
    bool heap_less(uint32_t a, uint32_t b) const;
};

struct SearchStats {
    uint64_t seed_attempts = 0;
    uint64_t nonempty_buckets = 0;
    uint64_t max_bucket_size = 0;
};

// Builds one bucket function per bucket index and the offset array.
// Throws BucketOverflowError, DuplicateFingerprintError,
// SeedSearchExhaustedError; the caller owns the retry policy.
PerfectHashFunction search_step(const SpillFileSet& spill, const HashProvider& provider,
                                const BuildConfig& config, uint32_t bucket_bits,
                                uint64_t search_seed, SearchStats* stats = nullptr);

struct BuildReport {
    uint64_t key_count = 0;
    uint32_t bucket_bits = 0;
    double partition_seconds = 0;
    double search_seconds = 0;
    uint64_t spill_disk_files = 0;
    uint64_t seed_attempts = 0;
    uint64_t nonempty_buckets = 0;
    uint64_t max_bucket_size = 0;
    uint64_t seek_estimate = 0;  // worst-case buffered-read seeks
    uint32_t restarts = 0;

    double mean_attempts() const {
        return nonempty_buckets ? double(seed_attempts) / double(nonempty_buckets) : 0.0;
    }
    double acyclic_rate() const {
        return seed_attempts ? double(nonempty_buckets) / double(seed_attempts) : 0.0;
    }
};

// The two-step pipeline with its retry policy: bucket overflow restarts with
// one more bucket bit (up to 3 times), duplicate fingerprints and exhausted
// seed searches restart with fresh hash functions (up to 3 times, after
// which surviving duplicates are reported with their input lines).
PerfectHashFunction build_external(KeySource& source, const BuildConfig& config,
                                   BuildReport* report = nullptr);

// In-memory build of the whole key set as a single bucket, using the
// heuristic hash family regardless of config.provider. The key set must fit
// in memory; config.max_bucket_size does not apply.
PerfectHashFunction build_standalone(KeySource& source, const BuildConfig& config,
                                     BuildReport* report = nullptr);

}  // namespace mphb
