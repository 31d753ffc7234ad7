#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "mphb/bucket_hash.hpp"
#include "mphb/errors.hpp"
#include "mphb/gf2_hash.hpp"
#include "mphb/graph.hpp"

using namespace mphb;

namespace {

std::vector<Fingerprint128> random_bucket(std::size_t size, uint64_t seed) {
    auto map = LinearMapGf2::sample(seed, 65);
    auto keys = test::random_keys(size, seed + 1, 8, 48);
    std::vector<Fingerprint128> fps;
    fps.reserve(size);
    for (const auto& key : keys) fps.push_back(map.fingerprint(key));
    return fps;
}

// Independent oracle: evaluate rho in 128-bit arithmetic with no
// intermediate reductions.
uint64_t rho_bigint(const BucketHashTables& tables, Fingerprint128 fp, uint32_t seed,
                    unsigned delta) {
    unsigned __int128 plain = 0;
    unsigned __int128 scaled = 0;
    for (unsigned j = 1; j <= kLaneCount; ++j) {
        const uint32_t idx = fp.lane(j) ^ delta;
        plain += tables.entry(j - 1, idx);
        scaled += tables.entry(j - 1 + kLaneCount, idx);
    }
    return static_cast<uint64_t>((plain + static_cast<unsigned __int128>(seed) * scaled) % kPrime);
}

// Upper critical value of the chi-square distribution by the
// Wilson-Hilferty approximation.
double chi_square_critical(double df, double z) {
    const double t = 1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df));
    return df * t * t * t;
}

}  // namespace

TEST_CASE("rho over all-zero tables is zero") {
    auto tables = BucketHashTables::from_raw(
        std::vector<uint32_t>(BucketHashTables::kTableCount * BucketHashTables::kEntriesPerTable, 0));
    auto fps = random_bucket(4, 1);
    for (const auto& fp : fps) {
        CHECK(rho(tables, fp, 12345, 0) == 0);
        CHECK(rho(tables, fp, 12345, 1) == 0);
    }
}

TEST_CASE("rho picks up a single planted entry") {
    auto fp = random_bucket(1, 2)[0];
    std::vector<uint32_t> raw(BucketHashTables::kTableCount * BucketHashTables::kEntriesPerTable, 0);
    raw[fp.lane(1)] = 7;  // table 0, unscaled sum
    auto tables = BucketHashTables::from_raw(std::move(raw));
    CHECK(rho(tables, fp, 1, 0) == 7);
}

TEST_CASE("hash_pair reduces rho modulo the range") {
    auto fp = random_bucket(1, 3)[0];

    SUBCASE("singleton range") {
        auto tables = BucketHashTables::sample(9);
        CHECK(hash_pair(tables, fp, 77, 1) == HashPair{0, 0});
    }

    SUBCASE("planted rho values 10 and 23 mod 7") {
        std::vector<uint32_t> raw(
            BucketHashTables::kTableCount * BucketHashTables::kEntriesPerTable, 0);
        raw[fp.lane(1)] = 10;      // delta 0 hits the even index
        raw[fp.lane(1) ^ 1] = 23;  // delta 1 hits the odd neighbor
        auto tables = BucketHashTables::from_raw(std::move(raw));
        CHECK(rho(tables, fp, 5, 0) == 10);
        CHECK(rho(tables, fp, 5, 1) == 23);
        CHECK(hash_pair(tables, fp, 5, 7) == HashPair{3, 2});
    }
}

TEST_CASE("rho matches big-integer evaluation and never overflows") {
    auto tables = BucketHashTables::sample(10);
    SplitMix64 rng(11);
    auto fps = random_bucket(250, 12);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto& fp = fps[trial % fps.size()];
        const uint32_t seed = static_cast<uint32_t>(1 + rng.uniform_below(kPrime - 1));
        for (unsigned delta = 0; delta < 2; ++delta) {
            const uint64_t got = rho(tables, fp, seed, delta);
            CHECK(got == rho_bigint(tables, fp, seed, delta));
            CHECK(got < kPrime);
        }
    }
}

TEST_CASE("every table entry is below the prime") {
    auto tables = BucketHashTables::sample(13);
    uint64_t checked = 0;
    for (uint32_t v : tables.raw()) {
        CHECK(v < kPrime);
        ++checked;
    }
    CHECK(checked == BucketHashTables::kTableCount * BucketHashTables::kEntriesPerTable);
}

TEST_CASE("pair basis reproduces hash_pair") {
    auto tables = BucketHashTables::sample(14);
    auto fps = random_bucket(64, 15);
    SplitMix64 rng(16);
    for (const auto& fp : fps) {
        const auto basis = make_pair_basis(tables, fp);
        const uint32_t seed = static_cast<uint32_t>(1 + rng.uniform_below(kPrime - 1));
        CHECK(pair_from_basis(basis, seed, 268) == hash_pair(tables, fp, seed, 268));
    }
}

TEST_CASE("pair distribution over a 256-key bucket is uniform") {
    auto tables = BucketHashTables::sample(17);
    auto bucket = random_bucket(256, 18);
    std::vector<PairBasis> bases;
    for (const auto& fp : bucket) bases.push_back(make_pair_basis(tables, fp));

    constexpr uint64_t kRange = 268;
    constexpr int kSeeds = 10000;
    std::vector<uint32_t> cells(kRange * kRange, 0);
    SplitMix64 rng(19);
    for (int s = 0; s < kSeeds; ++s) {
        const uint32_t seed = static_cast<uint32_t>(1 + rng.uniform_below(kPrime - 1));
        for (const auto& basis : bases) {
            const auto [h1, h2] = pair_from_basis(basis, seed, kRange);
            ++cells[uint64_t{h1} * kRange + h2];
        }
    }
    const double expected = double(bucket.size()) * kSeeds / double(cells.size());
    double chi2 = 0;
    for (uint32_t observed : cells) {
        const double d = observed - expected;
        chi2 += d * d / expected;
    }
    const double df = double(cells.size()) - 1;
    CHECK(chi2 < chi_square_critical(df, 2.3263));  // alpha = 0.01
}

TEST_CASE("find_seed accepts a single-key bucket on the first attempt") {
    auto tables = BucketHashTables::sample(20);
    auto bucket = random_bucket(1, 21);
    SplitMix64 rng(22);
    GraphLabeler labeler;
    BitVec bits;
    auto result = find_seed(
        tables, bucket, 2,
        [&](std::span<const HashPair> pairs) {
            return labeler.label(build_graph(pairs, 2), bits);
        },
        rng);
    CHECK(result.attempts == 1);
    CHECK(result.seed >= 1);
    CHECK(result.seed < kPrime);
}

TEST_CASE("find_seed gives up after the attempt budget") {
    auto tables = BucketHashTables::sample(23);
    auto bucket = random_bucket(3, 24);
    SplitMix64 rng(25);
    uint32_t calls = 0;
    try {
        find_seed(
            tables, bucket, 4, [&](std::span<const HashPair>) { ++calls; return false; },
            rng, 5);
        FAIL("expected SeedSearchExhaustedError");
    } catch (const SeedSearchExhaustedError& e) {
        CHECK(e.attempts == 5);
    }
    CHECK(calls == 5);
}

TEST_CASE("seed search statistics on full buckets match the acyclicity rate") {
    auto tables = BucketHashTables::sample(26);
    SplitMix64 rng(27);
    GraphLabeler labeler;
    BitVec bits;

    constexpr int kBuckets = 500;
    constexpr uint64_t kTau = 268;
    uint64_t total_attempts = 0;
    for (int i = 0; i < kBuckets; ++i) {
        auto bucket = random_bucket(256, 1000 + i);
        auto result = find_seed(
            tables, bucket, kTau,
            [&](std::span<const HashPair> pairs) {
                return labeler.label(build_graph(pairs, kTau), bits);
            },
            rng);
        total_attempts += result.attempts;
    }
    // Full 256-key buckets accept a seed with probability 0.398 +- 0.004
    // (measured against a union-find oracle), so the mean attempt count
    // sits near 1/0.398 = 2.51.
    const double mean_attempts = double(total_attempts) / kBuckets;
    CHECK(mean_attempts >= 2.25);
    CHECK(mean_attempts <= 2.85);

    const double success_rate = double(kBuckets) / double(total_attempts);
    CHECK(success_rate >= 0.25);
    CHECK(success_rate <= 0.45);
}

TEST_CASE("pair collision rate across seeds stays near the random expectation") {
    auto tables = BucketHashTables::sample(28);
    auto bucket = random_bucket(256, 29);
    std::vector<PairBasis> bases;
    for (const auto& fp : bucket) bases.push_back(make_pair_basis(tables, fp));

    constexpr uint64_t kTau = 268;
    constexpr int kSeeds = 2000;
    SplitMix64 rng(30);
    uint64_t collisions = 0;
    std::vector<HashPair> pairs(bucket.size());
    for (int s = 0; s < kSeeds; ++s) {
        const uint32_t seed = static_cast<uint32_t>(1 + rng.uniform_below(kPrime - 1));
        for (std::size_t i = 0; i < bases.size(); ++i) {
            pairs[i] = pair_from_basis(bases[i], seed, kTau);
        }
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            for (std::size_t j = i + 1; j < pairs.size(); ++j) {
                collisions += pairs[i] == pairs[j];
            }
        }
    }
    const double key_pairs = 256.0 * 255.0 / 2.0;
    const double expected = key_pairs * kSeeds / (double(kTau) * kTau);
    const double sigma = std::sqrt(expected);
    CHECK(std::abs(double(collisions) - expected) <= 3.0 * sigma);
}
