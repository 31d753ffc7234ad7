#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "mphb/bucket_function.hpp"
#include "mphb/codec.hpp"
#include "mphb/external_build.hpp"

using namespace mphb;

namespace {

std::vector<std::string> make_keys(uint64_t count, std::size_t length) {
    std::vector<std::string> keys;
    keys.reserve(count);
    SplitMix64 rng(0xB33F);
    std::string key;
    for (uint64_t i = 0; i < count; ++i) {
        key.clear();
        uint64_t v = i;
        do {
            key.push_back(static_cast<char>(1 + v % 255));
            v /= 255;
        } while (v != 0);
        while (key.size() < length) key.push_back(static_cast<char>(1 + rng.next() % 255));
        keys.push_back(key);
    }
    return keys;
}

void BM_Fingerprint(benchmark::State& state) {
    const auto keys = make_keys(4096, static_cast<std::size_t>(state.range(0)));
    auto map = LinearMapGf2::sample(1, 80);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(map.fingerprint(keys[i]));
        i = (i + 1) & 4095;
    }
    state.SetBytesProcessed(int64_t(state.iterations()) * state.range(0));
}
BENCHMARK(BM_Fingerprint)->Arg(8)->Arg(16)->Arg(32)->Arg(64);

void BM_HeuristicFingerprint(benchmark::State& state) {
    const auto keys = make_keys(4096, static_cast<std::size_t>(state.range(0)));
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(heuristic_fingerprint(keys[i], 0x1234));
        i = (i + 1) & 4095;
    }
    state.SetBytesProcessed(int64_t(state.iterations()) * state.range(0));
}
BENCHMARK(BM_HeuristicFingerprint)->Arg(8)->Arg(64);

void BM_HashPair(benchmark::State& state) {
    auto map = LinearMapGf2::sample(2, 65);
    auto tables = BucketHashTables::sample(3);
    const auto keys = make_keys(4096, 24);
    std::vector<Fingerprint128> fps;
    for (const auto& key : keys) fps.push_back(map.fingerprint(key));
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(hash_pair(tables, fps[i], 0xABCD, 268));
        i = (i + 1) & 4095;
    }
}
BENCHMARK(BM_HashPair);

void BM_Rank(benchmark::State& state) {
    SplitMix64 rng(4);
    BitVec bits(1 << 20);
    for (uint64_t i = 0; i < bits.size(); ++i) {
        if (rng.next() & 1) bits.set(i);
    }
    auto rv = build_rank(std::move(bits), 128);
    uint64_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(rv.rank1(i));
        i = (i * 2654435761u + 1) & ((1 << 20) - 1);
    }
}
BENCHMARK(BM_Rank);

void BM_BucketBuild(benchmark::State& state) {
    auto provider = HashProvider::provable(5, 65);
    const auto keys = make_keys(256, 24);
    std::vector<Fingerprint128> fps;
    for (const auto& key : keys) fps.push_back(provider.fingerprint(key));
    BucketBuilder builder(provider);
    for (auto _ : state) {
        SplitMix64 rng(state.iterations());
        benchmark::DoNotOptimize(builder.build(fps, {}, rng, nullptr));
    }
    state.SetItemsProcessed(int64_t(state.iterations()) * 256);
}
BENCHMARK(BM_BucketBuild);

void BM_Evaluate(benchmark::State& state) {
    const auto keys = make_keys(100000, 24);
    SpanKeySource source(keys);
    BuildConfig config;
    config.memory_budget = 16 << 20;
    auto f = build_external(source, config);
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(f.evaluate(keys[i]));
        if (++i == keys.size()) i = 0;
    }
    state.SetItemsProcessed(int64_t(state.iterations()));
}
BENCHMARK(BM_Evaluate);

}  // namespace

BENCHMARK_MAIN();
