#include "mphb/external_build.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cassert>
#include <chrono>
#include <cmath>
#include <cstring>

#include "mphb/errors.hpp"

namespace mphb {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

HashProvider make_provider(const BuildConfig& config, uint64_t round_seed) {
    if (config.provider == HashProviderMode::kProvable) {
        return HashProvider::provable(round_seed, config.max_key_bytes);
    }
    return HashProvider::heuristic(static_cast<uint32_t>(mix64(round_seed)));
}

// Fresh spill directory for builds that did not name one, so that
// concurrent builds cannot clobber each other's run files.
std::filesystem::path fresh_spill_dir() {
    static std::atomic<uint64_t> counter{0};
    const uint64_t id = counter.fetch_add(1);
    return std::filesystem::temp_directory_path() /
           ("mphb-spill-" + std::to_string(::getpid()) + "-" + std::to_string(id));
}

struct BufferedWriter {
    explicit BufferedWriter(const std::filesystem::path& path)
        : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw IoError("cannot create spill file " + path.string());
        buffer_.reserve(kFlushAt);
    }

    void write(const unsigned char* data, std::size_t size) {
        buffer_.insert(buffer_.end(), data, data + size);
        if (buffer_.size() >= kFlushAt) flush();
    }

    void finish() {
        flush();
        out_.close();
        if (!out_) throw IoError("write failure on spill file " + path_.string());
    }

  private:
    static constexpr std::size_t kFlushAt = 1 << 20;

    void flush() {
        if (buffer_.empty()) return;
        out_.write(reinterpret_cast<const char*>(buffer_.data()),
                   static_cast<std::streamsize>(buffer_.size()));
        if (!out_) throw IoError("write failure on spill file " + path_.string());
        buffer_.clear();
    }

    std::filesystem::path path_;
    std::ofstream out_;
    std::vector<unsigned char> buffer_;
};

uint32_t record_bucket(const unsigned char* record, std::size_t record_size,
                       uint32_t bucket_bits) {
    if (bucket_bits == 0) return 0;
    uint32_t high_word;
    std::memcpy(&high_word, record + record_size - 4, 4);
    return high_word >> (32 - bucket_bits);
}

}  // namespace

void BuildConfig::validate() const {
    if (memory_budget < kMemoryFloor) {
        throw ConfigError("memory budget " + std::to_string(memory_budget) +
                          " is below the floor of " + std::to_string(kMemoryFloor) + " bytes");
    }
    if (max_bucket_size == 0) throw ConfigError("max bucket size must be positive");
    if (provider == HashProviderMode::kProvable && max_bucket_size > 256) {
        throw ConfigError("max bucket size is limited to 256 in provable mode");
    }
    if (max_bucket_size > 65535) throw ConfigError("max bucket size is limited to 65535");
    if (bucket_bits > 28) throw ConfigError("bucket bits must be in [1, 28] (or 0 for auto)");
    if (epsilon_micro == 0) throw ConfigError("epsilon must be positive");
    if (kappa == 0) throw ConfigError("kappa must be positive");
    if (provider == HashProviderMode::kProvable && max_key_bytes == 0) {
        throw ConfigError("maximum key length must be positive");
    }
    if (max_seed_attempts == 0) throw ConfigError("seed attempt budget must be positive");
}

uint32_t choose_bucket_bits(uint64_t key_count, uint32_t max_bucket_size) {
    // Anchor points (log2 n, b) calibrated on uniform random keys with
    // bucket capacity 256; piecewise-linear in log2 n between them.
    static constexpr struct {
        double log2n;
        double bits;
    } kAnchors[] = {
        {13.2877, 6},  {16.6096, 9},  {19.9316, 13}, {21.0, 14},  {22.0, 15},
        {23.0, 16},    {23.2535, 16}, {24.0, 17},    {25.0, 18},  {26.0, 19},
        {26.5754, 20}, {27.0, 20},    {29.0, 22},    {29.8974, 23},
    };
    constexpr std::size_t kAnchorCount = std::size(kAnchors);

    const double x = std::log2(static_cast<double>(std::max<uint64_t>(key_count, 1)));
    double bits;
    if (x <= kAnchors[0].log2n) {
        bits = kAnchors[0].bits;
    } else if (x >= kAnchors[kAnchorCount - 1].log2n) {
        // One more bit per doubling past the last anchor.
        bits = kAnchors[kAnchorCount - 1].bits + (x - kAnchors[kAnchorCount - 1].log2n);
    } else {
        std::size_t hi = 1;
        while (kAnchors[hi].log2n < x) ++hi;
        const auto& a = kAnchors[hi - 1];
        const auto& b = kAnchors[hi];
        bits = a.bits + (x - a.log2n) / (b.log2n - a.log2n) * (b.bits - a.bits);
    }
    // The anchor table assumes capacity 256; a smaller capacity needs
    // correspondingly more buckets (shape b ~ log n - log(ell / log ell)).
    if (max_bucket_size != 256) {
        const double ell = max_bucket_size;
        bits += 5.0 - std::log2(ell / std::log2(std::max(ell, 2.0)));
    }
    const long long rounded = std::llround(bits);
    return static_cast<uint32_t>(std::clamp<long long>(rounded, 1, 28));
}

FileKeySource::FileKeySource(std::filesystem::path path)
    : path_(std::move(path)), buffer_(256 << 10) {
    in_.open(path_, std::ios::binary);
    if (!in_) throw IoError("cannot open key file " + path_.string());
}

void FileKeySource::refill() {
    in_.read(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
    if (in_.bad()) throw IoError("read failure on key file " + path_.string());
    len_ = static_cast<std::size_t>(in_.gcount());
    pos_ = 0;
    exhausted_ = len_ == 0;
}

bool FileKeySource::next(std::string_view& key) {
    pending_.clear();
    for (;;) {
        if (pos_ == len_) {
            refill();
            if (exhausted_) {
                if (pending_.empty()) return false;
                key = pending_;  // final line without a trailing newline
                break;
            }
        }
        const char* start = buffer_.data() + pos_;
        const std::size_t avail = len_ - pos_;
        const char* nl = static_cast<const char*>(std::memchr(start, '\n', avail));
        if (nl == nullptr) {
            pending_.append(start, avail);
            pos_ = len_;
            continue;
        }
        const std::size_t line_len = static_cast<std::size_t>(nl - start);
        pos_ += line_len + 1;
        if (pending_.empty()) {
            key = std::string_view(start, line_len);
        } else {
            pending_.append(start, line_len);
            key = pending_;
        }
        break;
    }
    ++line_;
    if (key.empty()) {
        throw IoError("empty key at line " + std::to_string(line_) + " of " + path_.string());
    }
    if (std::memchr(key.data(), '\0', key.size()) != nullptr) {
        throw IoError("NUL byte in key at line " + std::to_string(line_) + " of " + path_.string());
    }
    return true;
}

void FileKeySource::reset() {
    in_.clear();
    in_.seekg(0);
    pos_ = 0;
    len_ = 0;
    exhausted_ = false;
    pending_.clear();
    line_ = 0;
}

SpillFileSet::~SpillFileSet() {
    if (keep) return;
    std::error_code ec;
    for (const auto& run : runs) {
        if (!run.path.empty()) std::filesystem::remove(run.path, ec);
    }
    if (!cleanup_dir.empty()) std::filesystem::remove(cleanup_dir, ec);
}

SpillFileSet partition_step(KeySource& source, const HashProvider& provider,
                            const BuildConfig& config, uint32_t bucket_bits) {
    const std::size_t record_size = provider.record_size();
    const uint64_t capacity = std::max<uint64_t>(1, config.memory_budget / record_size);

    SpillFileSet spill;
    spill.record_size = record_size;
    spill.keep = config.keep_spills;

    std::filesystem::path dir = config.workdir;
    if (dir.empty()) {
        dir = fresh_spill_dir();
        spill.cleanup_dir = dir;
    }
    std::filesystem::create_directories(dir);

    std::vector<unsigned char> block;
    block.reserve(capacity * record_size);
    std::vector<uint32_t> counts(uint64_t{1} << bucket_bits);
    std::vector<uint32_t> cursor(counts.size());
    std::vector<uint32_t> order;
    order.reserve(capacity);

    // Stable indirect counting sort on the bucket index: order[k] is the
    // block-local index of the record that belongs at position k.
    auto sort_block = [&](uint64_t records) {
        std::fill(counts.begin(), counts.end(), 0);
        for (uint64_t r = 0; r < records; ++r) {
            ++counts[record_bucket(block.data() + r * record_size, record_size, bucket_bits)];
        }
        uint32_t running = 0;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            cursor[i] = running;
            running += counts[i];
        }
        order.resize(records);
        for (uint64_t r = 0; r < records; ++r) {
            const uint32_t b = record_bucket(block.data() + r * record_size, record_size, bucket_bits);
            order[cursor[b]++] = static_cast<uint32_t>(r);
        }
    };

    uint64_t total = 0;
    uint64_t records = 0;
    uint32_t file_index = 0;
    std::string_view key;
    while (source.next(key)) {
        Fingerprint128 fp;
        try {
            fp = provider.fingerprint(key);
        } catch (const KeyTooLongError& e) {
            throw KeyTooLongError(e.length, e.max_length, source.line());
        }
        if (records == capacity) {
            // Block full and more keys follow: dump it in sorted order. The
            // gather jumps around the whole block, so stay ahead of it.
            sort_block(records);
            ++file_index;
            const auto path = dir / ("run-" + std::to_string(file_index) + ".spill");
            BufferedWriter writer(path);
            constexpr uint64_t kAhead = 16;
            for (uint64_t k = 0; k < records; ++k) {
                if (k + kAhead < records) {
                    __builtin_prefetch(block.data() + uint64_t{order[k + kAhead]} * record_size);
                }
                writer.write(block.data() + uint64_t{order[k]} * record_size, record_size);
            }
            writer.finish();
            spill.runs.push_back({path, {}, {}, records});
            block.clear();
            records = 0;
        }
        unsigned char record[16];
        store_record(fp, record, record_size);
        block.insert(block.end(), record, record + record_size);
        ++records;
        ++total;
    }

    // Last block stays in memory instead of being written and read back,
    // and is never physically reordered: the search step walks it through
    // the permutation.
    sort_block(records);
    block.shrink_to_fit();
    order.shrink_to_fit();
    spill.runs.push_back({{}, std::move(block), std::move(order), records});

    spill.total_records = total;
    spill.disk_files = file_index;
    return spill;
}

// ---------------------------------------------------------------------------
// Bucket streaming

struct BucketStream::Reader {
    std::ifstream file;
    std::vector<unsigned char> buffer;
    std::size_t buffer_pos = 0;
    std::size_t buffer_len = 0;
    const SpillRun* memory_run = nullptr;
    uint64_t memory_pos = 0;
    std::size_t record_size = 16;
    uint32_t bucket_bits = 0;
    uint64_t remaining = 0;
    bool has = false;
    Fingerprint128 current;
    uint32_t current_bucket = 0;

    void advance() {
        if (remaining == 0) {
            has = false;
            return;
        }
        const unsigned char* record;
        if (memory_run) {
            constexpr uint64_t kAhead = 16;
            if (memory_pos + kAhead < memory_run->record_count) {
                __builtin_prefetch(memory_run->record(memory_pos + kAhead, record_size));
            }
            record = memory_run->record(memory_pos, record_size);
            ++memory_pos;
        } else {
            if (buffer_pos + record_size > buffer_len) refill();
            record = buffer.data() + buffer_pos;
            buffer_pos += record_size;
        }
        current = load_record(record, record_size);
        current_bucket = record_bucket(record, record_size, bucket_bits);
        --remaining;
        has = true;
    }

    void refill() {
        file.read(reinterpret_cast<char*>(buffer.data()),
                  static_cast<std::streamsize>(buffer.size()));
        buffer_len = static_cast<std::size_t>(file.gcount());
        buffer_pos = 0;
        if (buffer_len < record_size) throw IoError("truncated spill file");
    }
};

BucketStream::BucketStream(const SpillFileSet& spill, uint64_t memory_budget,
                           uint32_t bucket_bits)
    : bucket_bits_(bucket_bits) {
    const std::size_t run_count = std::max<std::size_t>(spill.runs.size(), 1);
    // Per-file read buffer of memory_budget / N bytes, rounded down to whole
    // records so a record never straddles a refill.
    std::size_t buffer_bytes = static_cast<std::size_t>(memory_budget / run_count);
    buffer_bytes -= buffer_bytes % spill.record_size;
    buffer_bytes = std::max(buffer_bytes, spill.record_size);

    for (const auto& run : spill.runs) {
        if (run.record_count == 0) continue;
        auto reader = std::make_unique<Reader>();
        reader->record_size = spill.record_size;
        reader->bucket_bits = bucket_bits;
        reader->remaining = run.record_count;
        if (run.path.empty()) {
            reader->memory_run = &run;
        } else {
            reader->file.open(run.path, std::ios::binary);
            if (!reader->file) throw IoError("cannot open spill file " + run.path.string());
            reader->buffer.resize(buffer_bytes);
        }
        reader->advance();
        readers_.push_back(std::move(reader));
        heap_push(static_cast<uint32_t>(readers_.size() - 1));
    }
}

BucketStream::~BucketStream() = default;

bool BucketStream::heap_less(uint32_t a, uint32_t b) const {
    const auto& ra = *readers_[a];
    const auto& rb = *readers_[b];
    if (ra.current_bucket != rb.current_bucket) return ra.current_bucket < rb.current_bucket;
    return a < b;  // deterministic tie-break on run order
}

void BucketStream::heap_push(uint32_t reader) {
    heap_.push_back(reader);
    std::push_heap(heap_.begin(), heap_.end(),
                   [this](uint32_t a, uint32_t b) { return heap_less(b, a); });
}

uint32_t BucketStream::heap_pop() {
    std::pop_heap(heap_.begin(), heap_.end(),
                  [this](uint32_t a, uint32_t b) { return heap_less(b, a); });
    const uint32_t top = heap_.back();
    heap_.pop_back();
    return top;
}

void BucketStream::read_bucket(uint32_t index, std::vector<Fingerprint128>& out) {
    out.clear();
    while (!heap_.empty()) {
        Reader& reader = *readers_[heap_.front()];
        if (reader.current_bucket != index) {
            assert(reader.current_bucket > index && "spill runs must be bucket-sorted");
            return;
        }
        const uint32_t top = heap_pop();
        do {
            out.push_back(reader.current);
            reader.advance();
        } while (reader.has && reader.current_bucket == index);
        if (reader.has) heap_push(top);
    }
}

// ---------------------------------------------------------------------------
// Search step

PerfectHashFunction search_step(const SpillFileSet& spill, const HashProvider& provider,
                                const BuildConfig& config, uint32_t bucket_bits,
                                uint64_t search_seed, SearchStats* stats) {
    const uint64_t bucket_count = uint64_t{1} << bucket_bits;
    BucketStream stream(spill, config.memory_budget, bucket_bits);

    std::vector<uint64_t> offsets(bucket_count + 1, 0);
    std::vector<BucketFunction> buckets(bucket_count);
    BucketBuilder builder(provider);
    const BucketBuildSettings settings{config.epsilon_micro, config.kappa, config.mode,
                                       config.max_seed_attempts};
    std::vector<Fingerprint128> bucket_fps;
    bucket_fps.reserve(config.max_bucket_size);

    SearchStats local{};
    for (uint64_t i = 0; i < bucket_count; ++i) {
        stream.read_bucket(static_cast<uint32_t>(i), bucket_fps);
        if (bucket_fps.size() > config.max_bucket_size) {
            throw BucketOverflowError(i, bucket_fps.size(), config.max_bucket_size);
        }
        uint32_t attempts = 0;
        SplitMix64 rng(derive_seed(search_seed, i));
        buckets[i] = builder.build(bucket_fps, settings, rng, &attempts);
        offsets[i + 1] = offsets[i] + bucket_fps.size();
        local.seed_attempts += attempts;
        if (!bucket_fps.empty()) {
            ++local.nonempty_buckets;
            local.max_bucket_size = std::max<uint64_t>(local.max_bucket_size, bucket_fps.size());
        }
    }
    assert(offsets.back() == spill.total_records);
    if (stats) *stats = local;

    return PerfectHashFunction::from_parts(config.mode, provider, bucket_bits,
                                           config.epsilon_micro, config.kappa,
                                           std::move(offsets), std::move(buckets));
}

// ---------------------------------------------------------------------------
// Retry drivers

namespace {

[[noreturn]] void report_duplicate_keys(KeySource& source, const HashProvider& provider,
                                        const DuplicateFingerprintError& dup) {
    const Fingerprint128 target{dup.fp_lo, dup.fp_hi};
    std::vector<uint64_t> lines;
    std::string_view key;
    source.reset();
    while (source.next(key)) {
        if (provider.fingerprint(key) == target) lines.push_back(source.line());
    }
    throw DuplicateKeysError(std::move(lines));
}

constexpr uint32_t kMaxBucketBitRetries = 3;
constexpr uint32_t kMaxSeedRetries = 3;

}  // namespace

PerfectHashFunction build_external(KeySource& source, const BuildConfig& config,
                                   BuildReport* report) {
    config.validate();
    BuildReport rep{};

    uint32_t bucket_bits = config.bucket_bits;
    if (bucket_bits == 0) {
        uint64_t n = 0;
        std::string_view key;
        source.reset();
        while (source.next(key)) ++n;
        bucket_bits = choose_bucket_bits(std::max<uint64_t>(n, 1), config.max_bucket_size);
    }

    uint32_t bit_retries = 0;
    uint32_t seed_retries = 0;
    for (;;) {
        const uint64_t round_seed = derive_seed(config.rng_seed, seed_retries);
        const HashProvider provider = make_provider(config, round_seed);
        source.reset();
        try {
            const auto partition_start = Clock::now();
            const SpillFileSet spill = partition_step(source, provider, config, bucket_bits);
            rep.partition_seconds += seconds_since(partition_start);

            const auto search_start = Clock::now();
            SearchStats stats;
            PerfectHashFunction function =
                search_step(spill, provider, config, bucket_bits,
                            derive_seed(round_seed, 0x736561), &stats);
            rep.search_seconds += seconds_since(search_start);

            rep.key_count = spill.total_records;
            rep.bucket_bits = bucket_bits;
            rep.spill_disk_files = spill.disk_files;
            rep.seed_attempts = stats.seed_attempts;
            rep.nonempty_buckets = stats.nonempty_buckets;
            rep.max_bucket_size = stats.max_bucket_size;
            if (spill.disk_files > 0) {
                const uint64_t beta = spill.total_records * spill.record_size;
                const uint64_t runs = spill.runs.size();
                rep.seek_estimate = (beta * runs + config.memory_budget - 1) / config.memory_budget;
            }
            if (report) *report = rep;
            return function;
        } catch (const BucketOverflowError&) {
            if (++bit_retries > kMaxBucketBitRetries) throw;
            ++bucket_bits;
            ++rep.restarts;
        } catch (const DuplicateFingerprintError& dup) {
            if (++seed_retries > kMaxSeedRetries) report_duplicate_keys(source, provider, dup);
            ++rep.restarts;
        } catch (const SeedSearchExhaustedError&) {
            if (++seed_retries > kMaxSeedRetries) throw;
            ++rep.restarts;
        }
    }
}

PerfectHashFunction build_standalone(KeySource& source, const BuildConfig& config,
                                     BuildReport* report) {
    config.validate();
    BuildReport rep{};

    uint32_t seed_retries = 0;
    for (;;) {
        const uint64_t round_seed = derive_seed(config.rng_seed, seed_retries);
        const HashProvider provider =
            HashProvider::heuristic(static_cast<uint32_t>(mix64(round_seed)));
        source.reset();

        const auto map_start = Clock::now();
        std::vector<Fingerprint128> fingerprints;
        std::string_view key;
        while (source.next(key)) fingerprints.push_back(provider.fingerprint(key));
        rep.partition_seconds += seconds_since(map_start);

        try {
            const auto search_start = Clock::now();
            BucketBuilder builder(provider);
            const BucketBuildSettings settings{config.epsilon_micro, config.kappa, config.mode,
                                               config.max_seed_attempts};
            SplitMix64 rng(derive_seed(round_seed, 0x736561));
            uint32_t attempts = 0;
            BucketFunction bucket = builder.build(fingerprints, settings, rng, &attempts);
            rep.search_seconds += seconds_since(search_start);

            const uint64_t n = fingerprints.size();
            std::vector<uint64_t> offsets{0, n};
            std::vector<BucketFunction> buckets;
            buckets.push_back(std::move(bucket));

            rep.key_count = n;
            rep.bucket_bits = 0;
            rep.seed_attempts = attempts;
            rep.nonempty_buckets = n ? 1 : 0;
            rep.max_bucket_size = n;
            if (report) *report = rep;
            return PerfectHashFunction::from_parts(config.mode, provider, 0,
                                                   config.epsilon_micro, config.kappa,
                                                   std::move(offsets), std::move(buckets));
        } catch (const DuplicateFingerprintError& dup) {
            if (++seed_retries > kMaxSeedRetries) report_duplicate_keys(source, provider, dup);
            ++rep.restarts;
        } catch (const SeedSearchExhaustedError&) {
            if (++seed_retries > kMaxSeedRetries) throw;
            ++rep.restarts;
        }
    }
}

}  // namespace mphb
