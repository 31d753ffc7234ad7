#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mphb {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

// Key exceeds the maximum length the sampled linear map can fingerprint.
struct KeyTooLongError : Error {
    KeyTooLongError(std::size_t length, std::size_t max_length, uint64_t line = 0)
        : Error("key of " + std::to_string(length) + " bytes exceeds maximum of " +
                std::to_string(max_length) + (line ? " (input line " + std::to_string(line) + ")" : "")),
          length(length),
          max_length(max_length),
          line(line) {}
    std::size_t length;
    std::size_t max_length;
    uint64_t line;
};

// No bucket seed produced an acyclic graph within the attempt budget.
struct SeedSearchExhaustedError : Error {
    explicit SeedSearchExhaustedError(uint64_t attempts)
        : Error("seed search exhausted after " + std::to_string(attempts) + " attempts"),
          attempts(attempts) {}
    uint64_t attempts;
};

struct BucketOverflowError : Error {
    BucketOverflowError(uint64_t bucket, uint64_t size, uint64_t limit)
        : Error("bucket " + std::to_string(bucket) + " holds " + std::to_string(size) +
                " keys, limit " + std::to_string(limit)),
          bucket(bucket),
          size(size),
          limit(limit) {}
    uint64_t bucket;
    uint64_t size;
    uint64_t limit;
};

// Two identical fingerprints met in one bucket. Either a hash collision
// (fresh seeds will resolve it) or true duplicate keys in the input.
struct DuplicateFingerprintError : Error {
    DuplicateFingerprintError(uint64_t fp_lo, uint64_t fp_hi)
        : Error("duplicate fingerprint within a bucket"), fp_lo(fp_lo), fp_hi(fp_hi) {}
    uint64_t fp_lo;
    uint64_t fp_hi;
};

// Duplicates survived every restart: the colliding input lines are reported.
struct DuplicateKeysError : Error {
    explicit DuplicateKeysError(std::vector<uint64_t> lines_in)
        : Error(make_message(lines_in)), lines(std::move(lines_in)) {}
    std::vector<uint64_t> lines;

  private:
    static std::string make_message(const std::vector<uint64_t>& lines) {
        std::string msg = "duplicate keys in input at line(s)";
        for (uint64_t l : lines) msg += " " + std::to_string(l);
        return msg;
    }
};

// Malformed or truncated function image; offset is the failing byte position.
struct FormatError : Error {
    FormatError(const std::string& what, uint64_t offset)
        : Error(what + " (at byte offset " + std::to_string(offset) + ")"), offset(offset) {}
    uint64_t offset;
};

}  // namespace mphb
