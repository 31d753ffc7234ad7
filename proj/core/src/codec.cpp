#include "mphb/codec.hpp"

#include <istream>
#include <ostream>
#include <vector>

#include "mphb/errors.hpp"

namespace mphb {

namespace {

constexpr uint64_t kFnvOffset = 14695981039346656037ull;
constexpr uint64_t kFnvPrime = 1099511628211ull;

uint32_t offset_entry_bytes(uint64_t key_count) {
    if (key_count < (1ull << 8)) return 1;
    if (key_count < (1ull << 16)) return 2;
    if (key_count < (1ull << 32)) return 4;
    return 8;
}

uint32_t sample_entry_bytes(uint32_t kappa) { return kappa < 256 ? 1 : 2; }

uint64_t sample_count(uint64_t bit_length, uint32_t kappa) {
    return bit_length == 0 ? 0 : (bit_length - 1) / kappa;
}

class ImageWriter {
  public:
    explicit ImageWriter(std::ostream& out) : out_(out) {}

    void write(const void* data, std::size_t size) {
        const unsigned char* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < size; ++i) {
            hash_ = (hash_ ^ bytes[i]) * kFnvPrime;
        }
        out_.write(reinterpret_cast<const char*>(bytes), static_cast<std::streamsize>(size));
        if (!out_) throw IoError("write failure while encoding function image");
        written_ += size;
    }

    void u8(uint8_t v) { write(&v, 1); }
    void u16(uint16_t v) { le(v); }
    void u32(uint32_t v) { le(v); }
    void u64(uint64_t v) { le(v); }

    void bits(const BitVec& v) {
        const uint64_t bytes = (v.size() + 7) / 8;
        const auto words = v.words();
        for (uint64_t k = 0; k < bytes; ++k) {
            u8(static_cast<uint8_t>(words[k >> 3] >> (8 * (k & 7))));
        }
    }

    uint64_t written() const { return written_; }

    void finish() {
        const uint64_t checksum = hash_;
        unsigned char bytes[8];
        for (std::size_t i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(checksum >> (8 * i));
        out_.write(reinterpret_cast<const char*>(bytes), 8);
        out_.flush();
        if (!out_) throw IoError("write failure while encoding function image");
        written_ += 8;
    }

  private:
    template <typename T>
    void le(T v) {
        unsigned char bytes[sizeof(T)];
        for (std::size_t i = 0; i < sizeof(T); ++i) {
            bytes[i] = static_cast<unsigned char>(v >> (8 * i));
        }
        write(bytes, sizeof(T));
    }

    std::ostream& out_;
    uint64_t hash_ = kFnvOffset;
    uint64_t written_ = 0;
};

class ImageReader {
  public:
    explicit ImageReader(std::istream& in) : in_(in) {}

    void read(void* data, std::size_t size) {
        in_.read(static_cast<char*>(data), static_cast<std::streamsize>(size));
        if (static_cast<std::size_t>(in_.gcount()) != size) {
            throw FormatError("truncated function image", offset_);
        }
        const unsigned char* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < size; ++i) {
            hash_ = (hash_ ^ bytes[i]) * kFnvPrime;
        }
        offset_ += size;
    }

    uint8_t u8() {
        uint8_t v;
        read(&v, 1);
        return v;
    }
    uint16_t u16() { return le<uint16_t>(); }
    uint32_t u32() { return le<uint32_t>(); }
    uint64_t u64() { return le<uint64_t>(); }

    BitVec bits(uint64_t bit_length) {
        const uint64_t bytes = (bit_length + 7) / 8;
        std::vector<uint64_t> words((bit_length + 63) / 64, 0);
        for (uint64_t k = 0; k < bytes; ++k) {
            words[k >> 3] |= uint64_t{u8()} << (8 * (k & 7));
        }
        return BitVec(std::move(words), bit_length);
    }

    uint64_t offset() const { return offset_; }

    void finish() {
        const uint64_t expected = hash_;
        unsigned char bytes[8];
        in_.read(reinterpret_cast<char*>(bytes), 8);
        if (in_.gcount() != 8) throw FormatError("truncated function image", offset_);
        uint64_t stored = 0;
        for (std::size_t i = 0; i < 8; ++i) stored |= uint64_t{bytes[i]} << (8 * i);
        if (stored != expected) throw FormatError("checksum mismatch, image is corrupted", offset_);
    }

  private:
    template <typename T>
    T le() {
        unsigned char bytes[sizeof(T)];
        read(bytes, sizeof(T));
        T v = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i) v |= T{bytes[i]} << (8 * i);
        return v;
    }

    std::istream& in_;
    uint64_t hash_ = kFnvOffset;
    uint64_t offset_ = 0;
};

}  // namespace

EncodeReport encode(const PerfectHashFunction& function, std::ostream& out) {
    ImageWriter writer(out);
    const uint64_t n = function.key_count();

    writer.write(kImageMagic.data(), kImageMagic.size());
    writer.u32(kImageVersion);
    writer.u8(static_cast<uint8_t>(function.mode()));
    writer.u8(static_cast<uint8_t>(function.provider().mode()));
    writer.u16(0);
    writer.u32(function.bucket_bits());
    writer.u64(n);
    writer.u32(function.epsilon_micro());
    writer.u32(function.kappa());
    const bool provable = function.provider().mode() == HashProviderMode::kProvable;
    writer.u32(provable ? function.provider().linear_map().max_key_bytes() : 0);
    writer.u32(provable ? 0 : function.provider().body_seed());
    writer.u64(0);

    EncodeReport report;
    if (n == 0) {
        writer.finish();
        report.total_bytes = writer.written();
        return report;
    }

    const uint64_t provider_start = writer.written();
    if (provable) {
        for (const auto& entry : function.provider().linear_map().tables()) {
            writer.u64(entry.lo);
            writer.u64(entry.hi);
        }
        for (uint32_t value : function.provider().bucket_tables().raw()) {
            writer.u32(value);
        }
    }
    report.provider_bytes = writer.written() - provider_start;

    const uint64_t payload_start = writer.written();
    const auto& offsets = function.offsets();
    const uint32_t entry_bytes = offset_entry_bytes(n);
    for (std::size_t i = 1; i < offsets.size(); ++i) {
        unsigned char bytes[8];
        for (uint32_t k = 0; k < entry_bytes; ++k) {
            bytes[k] = static_cast<unsigned char>(offsets[i] >> (8 * k));
        }
        writer.write(bytes, entry_bytes);
    }

    const uint32_t sample_bytes = sample_entry_bytes(function.kappa());
    for (const auto& bucket : function.buckets()) {
        if (bucket.empty()) continue;
        writer.u32(bucket.seed());
        if (function.mode() == FunctionMode::kMphf) {
            writer.bits(bucket.occupancy().bits());
            writer.bits(bucket.select_packed());
            const auto samples = bucket.occupancy().samples();
            const uint64_t stored = sample_count(2 * bucket.tau(), function.kappa());
            for (uint64_t j = 1; j <= stored; ++j) {
                const uint64_t delta = samples[j] - samples[j - 1];
                if (sample_bytes == 1) {
                    writer.u8(static_cast<uint8_t>(delta));
                } else {
                    writer.u16(static_cast<uint16_t>(delta));
                }
            }
        } else {
            writer.bits(bucket.select_raw());
        }
    }
    report.payload_bytes = writer.written() - payload_start;

    writer.finish();
    report.total_bytes = writer.written();
    return report;
}

PerfectHashFunction decode(std::istream& in) {
    ImageReader reader(in);

    std::array<unsigned char, 4> magic;
    reader.read(magic.data(), magic.size());
    if (magic != kImageMagic) {
        throw FormatError("bad magic, expected \"MPHB\"", 0);
    }
    const uint32_t version = reader.u32();
    if (version != kImageVersion) {
        throw FormatError("unsupported format version " + std::to_string(version), 4);
    }
    const uint8_t mode_raw = reader.u8();
    if (mode_raw > 1) throw FormatError("bad function mode", reader.offset() - 1);
    const FunctionMode mode = static_cast<FunctionMode>(mode_raw);
    const uint8_t provider_raw = reader.u8();
    if (provider_raw > 1) throw FormatError("bad provider mode", reader.offset() - 1);
    const auto provider_mode = static_cast<HashProviderMode>(provider_raw);
    reader.u16();
    const uint32_t bucket_bits = reader.u32();
    if (bucket_bits > 28) throw FormatError("bucket bits out of range", reader.offset() - 4);
    const uint64_t n = reader.u64();
    const uint32_t epsilon_micro = reader.u32();
    if (epsilon_micro == 0) throw FormatError("epsilon must be positive", reader.offset() - 4);
    const uint32_t kappa = reader.u32();
    if (kappa == 0) throw FormatError("kappa must be positive", reader.offset() - 4);
    const uint32_t max_key_bytes = reader.u32();
    const uint32_t body_seed = reader.u32();
    reader.u64();

    if (n == 0) {
        reader.finish();
        return PerfectHashFunction::from_parts(mode, HashProvider{}, bucket_bits, epsilon_micro,
                                               kappa, {}, {});
    }

    HashProvider provider;
    if (provider_mode == HashProviderMode::kProvable) {
        if (max_key_bytes == 0) {
            throw FormatError("provable image without linear-map tables", reader.offset());
        }
        std::vector<Fingerprint128> map_tables(uint64_t{max_key_bytes} * 256);
        for (auto& entry : map_tables) {
            entry.lo = reader.u64();
            entry.hi = reader.u64();
        }
        std::vector<uint32_t> bucket_tables(BucketHashTables::kTableCount *
                                            BucketHashTables::kEntriesPerTable);
        for (auto& value : bucket_tables) {
            value = reader.u32();
            if (value >= kPrime) {
                throw FormatError("bucket-table entry out of range", reader.offset() - 4);
            }
        }
        provider = HashProvider::from_parts(LinearMapGf2::from_tables(max_key_bytes, std::move(map_tables)),
                                            BucketHashTables::from_raw(std::move(bucket_tables)));
    } else {
        provider = HashProvider::heuristic(body_seed);
    }

    const uint64_t bucket_count = uint64_t{1} << bucket_bits;
    const uint32_t entry_bytes = offset_entry_bytes(n);
    std::vector<uint64_t> offsets(bucket_count + 1, 0);
    for (uint64_t i = 1; i <= bucket_count; ++i) {
        unsigned char bytes[8];
        reader.read(bytes, entry_bytes);
        uint64_t value = 0;
        for (uint32_t k = 0; k < entry_bytes; ++k) value |= uint64_t{bytes[k]} << (8 * k);
        if (value < offsets[i - 1] || value > n) {
            throw FormatError("offset array is not a prefix-sum sequence",
                              reader.offset() - entry_bytes);
        }
        offsets[i] = value;
    }
    if (offsets.back() != n) {
        throw FormatError("offset array does not account for every key", reader.offset());
    }

    const uint32_t sample_bytes = sample_entry_bytes(kappa);
    std::vector<BucketFunction> buckets(bucket_count);
    for (uint64_t i = 0; i < bucket_count; ++i) {
        const uint64_t size = offsets[i + 1] - offsets[i];
        if (size == 0) continue;
        const uint64_t tau = tau_for(size, epsilon_micro);
        const uint32_t seed = reader.u32();
        if (mode == FunctionMode::kMphf) {
            BitVec occupancy_bits = reader.bits(2 * tau);
            BitVec packed = reader.bits(size);
            const uint64_t stored = sample_count(2 * tau, kappa);
            std::vector<uint64_t> samples(stored + 1, 0);
            for (uint64_t j = 1; j <= stored; ++j) {
                const uint64_t delta = sample_bytes == 1 ? reader.u8() : reader.u16();
                if (delta > kappa) {
                    throw FormatError("rank sample delta exceeds kappa", reader.offset() - sample_bytes);
                }
                samples[j] = samples[j - 1] + delta;
            }
            buckets[i] = BucketFunction::from_parts(
                seed, size, tau, mode,
                RankedBitVector(std::move(occupancy_bits), kappa, std::move(samples)), std::move(packed),
                {});
        } else {
            buckets[i] = BucketFunction::from_parts(seed, size, tau, mode, {}, {},
                                                    reader.bits(2 * tau));
        }
    }

    reader.finish();
    return PerfectHashFunction::from_parts(mode, std::move(provider), bucket_bits, epsilon_micro,
                                           kappa, std::move(offsets), std::move(buckets));
}

}  // namespace mphb
