#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <deque>
#include <vector>

#include "mphb/bucket_function.hpp"
#include "mphb/graph.hpp"
#include "mphb/rng.hpp"

using namespace mphb;

namespace {

BipartiteGraph random_graph(uint64_t edges, uint64_t tau, uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<HashPair> pairs;
    pairs.reserve(edges);
    for (uint64_t i = 0; i < edges; ++i) {
        pairs.push_back({static_cast<uint32_t>(rng.uniform_below(tau)),
                         static_cast<uint32_t>(rng.uniform_below(tau))});
    }
    return build_graph(pairs, tau);
}

// Independent oracle: breadth-first depths from the lowest left vertex of
// each component.
std::vector<int64_t> bfs_depths(const BipartiteGraph& g) {
    const uint64_t v_count = 2 * g.tau;
    std::vector<std::vector<uint32_t>> adj(v_count);
    for (const auto& e : g.edges) {
        adj[e.left].push_back(e.right);
        adj[e.right].push_back(e.left);
    }
    std::vector<int64_t> depth(v_count, -1);
    for (uint64_t root = 0; root < g.tau; ++root) {
        if (depth[root] >= 0 || adj[root].empty()) continue;
        depth[root] = 0;
        std::deque<uint32_t> queue{static_cast<uint32_t>(root)};
        while (!queue.empty()) {
            const uint32_t v = queue.front();
            queue.pop_front();
            for (uint32_t w : adj[v]) {
                if (depth[w] >= 0) continue;
                depth[w] = depth[v] + 1;
                queue.push_back(w);
            }
        }
    }
    return depth;
}

}  // namespace

TEST_CASE("tau formula") {
    CHECK(tau_for(256, 45000) == 268);
    CHECK(tau_for(1, 45000) == 2);
    CHECK(tau_for(0, 45000) == 0);
    CHECK(tau_for(1000, 45000) == 1045);
    CHECK(tau_for(1000000, 45000) == 1045000);
}

TEST_CASE("build_graph") {
    SUBCASE("no keys") {
        auto g = build_graph({}, 4);
        CHECK(g.edges.empty());
        CHECK(g.tau == 4);
    }
    SUBCASE("single pair is offset on the right side") {
        const std::vector<HashPair> pairs{{2, 5}};
        auto g = build_graph(pairs, 8);
        REQUIRE(g.edges.size() == 1);
        CHECK(g.edges[0].left == 2);
        CHECK(g.edges[0].right == 13);
    }
}

TEST_CASE("acyclicity detection") {
    SUBCASE("a path is acyclic") {
        const std::vector<HashPair> pairs{{0, 0}, {1, 0}, {1, 1}};
        CHECK(is_acyclic(build_graph(pairs, 4)));
    }
    SUBCASE("a repeated edge is a cycle") {
        const std::vector<HashPair> pairs{{0, 0}, {0, 0}};
        CHECK_FALSE(is_acyclic(build_graph(pairs, 4)));
    }
    SUBCASE("a four-edge cycle") {
        const std::vector<HashPair> pairs{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
        CHECK_FALSE(is_acyclic(build_graph(pairs, 4)));
    }
}

TEST_CASE("acyclic fraction of random graphs matches the measured finite-size rate") {
    // At n = 256, tau = 268 the acyclic probability is 0.398 +- 0.004,
    // measured over 20k graphs and cross-checked with a union-find oracle.
    // The asymptotic formula e^{1/c} * sqrt((c-2)/c) ~ 0.335 only describes
    // large n; the bipartite large-n limit sqrt(1-(n/tau)^2) is ~0.29.
    constexpr int kTrials = 10000;
    int acyclic = 0;
    for (int t = 0; t < kTrials; ++t) {
        acyclic += is_acyclic(random_graph(256, 268, 40000 + t));
    }
    const double rate = double(acyclic) / kTrials;
    CHECK(rate >= 0.37);
    CHECK(rate <= 0.43);
}

TEST_CASE("labels of a single edge") {
    const std::vector<HashPair> pairs{{3, 5}};
    auto g = build_graph(pairs, 8);
    GraphLabeler labeler;
    BitVec bits;
    REQUIRE(labeler.label(g, bits));
    REQUIRE(bits.size() == 16);
    CHECK_FALSE(bits.get(3));  // root, depth 0
    CHECK(bits.get(13));       // depth 1
}

TEST_CASE("labels along a path of length four") {
    // Path 0 - tau+0 - 1 - tau+1 - 2 rooted at 0: depths 0..4 give labels
    // 0,1,1,0,0.
    const std::vector<HashPair> pairs{{0, 0}, {1, 0}, {1, 1}, {2, 1}};
    const uint64_t tau = 4;
    auto g = build_graph(pairs, tau);
    GraphLabeler labeler;
    BitVec bits;
    REQUIRE(labeler.label(g, bits));
    CHECK_FALSE(bits.get(0));
    CHECK(bits.get(tau + 0));
    CHECK(bits.get(1));
    CHECK_FALSE(bits.get(tau + 1));
    CHECK_FALSE(bits.get(2));
}

TEST_CASE("isolated vertices keep a zero label") {
    const std::vector<HashPair> pairs{{1, 2}};
    auto g = build_graph(pairs, 4);
    GraphLabeler labeler;
    BitVec bits;
    REQUIRE(labeler.label(g, bits));
    for (uint64_t v : {0ull, 2ull, 3ull, 4ull, 5ull, 7ull}) CHECK_FALSE(bits.get(v));
}

TEST_CASE("the label xor selects the endpoint farther from the root") {
    int done = 0;
    for (uint64_t seed = 0; done < 50; ++seed) {
        auto g = random_graph(200, 209, 7000 + seed);
        GraphLabeler labeler;
        BitVec bits;
        if (!labeler.label(g, bits)) continue;
        ++done;
        const auto depth = bfs_depths(g);
        for (const auto& e : g.edges) {
            const bool pick_right = bits.get(e.left) != bits.get(e.right);
            const bool right_is_deeper = depth[e.right] > depth[e.left];
            CHECK(pick_right == right_is_deeper);
        }
    }
}

TEST_CASE("slots derived from the labels are distinct across edges") {
    int done = 0;
    for (uint64_t seed = 0; done < 50; ++seed) {
        auto g = random_graph(200, 209, 9000 + seed);
        GraphLabeler labeler;
        BitVec bits;
        if (!labeler.label(g, bits)) continue;
        ++done;
        std::vector<uint64_t> slots;
        for (const auto& e : g.edges) {
            slots.push_back(bits.get(e.left) == bits.get(e.right) ? e.left : e.right);
        }
        std::sort(slots.begin(), slots.end());
        CHECK(std::adjacent_find(slots.begin(), slots.end()) == slots.end());
    }
}
