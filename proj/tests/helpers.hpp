#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mphb/rng.hpp"

namespace mphb::test {

// Distinct random byte-string keys. A base-253 rendering of the index forms
// the prefix (bytes in [1,255] minus 0x0A, so keys are file-safe), followed
// by random filler, which guarantees distinctness without a set.
inline std::vector<std::string> random_keys(uint64_t count, uint64_t seed,
                                            std::size_t min_len = 8, std::size_t max_len = 32) {
    auto byte_ok = [](uint64_t v) -> char {
        unsigned char c = static_cast<unsigned char>(1 + v % 253);
        if (c >= 0x0A) ++c;  // skip newline
        return static_cast<char>(c);
    };
    std::vector<std::string> keys;
    keys.reserve(count);
    SplitMix64 rng(seed);
    std::string key;
    for (uint64_t i = 0; i < count; ++i) {
        key.clear();
        uint64_t v = i;
        do {
            key.push_back(byte_ok(v));
            v /= 253;
        } while (v != 0);
        const std::size_t target =
            min_len + (max_len > min_len ? rng.uniform_below(max_len - min_len + 1) : 0);
        while (key.size() < target) key.push_back(byte_ok(rng.next()));
        keys.push_back(key);
    }
    return keys;
}

}  // namespace mphb::test
