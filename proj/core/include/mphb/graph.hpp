#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mphb/bitvec.hpp"
#include "mphb/bucket_hash.hpp"

namespace mphb {

// Bipartite multigraph on vertex set [0, 2*tau): left side [0, tau), right
// side [tau, 2*tau). One edge per key, in key order; duplicate edges are
// representable and simply fail the acyclicity test.
struct BipartiteGraph {
    struct Edge {
        uint32_t left;   // in [0, tau)
        uint32_t right;  // in [tau, 2*tau)
    };

    uint64_t tau = 0;
    std::vector<Edge> edges;
};

// One edge per hash pair: {pair.first, tau + pair.second}.
BipartiteGraph build_graph(std::span<const HashPair> pairs, uint64_t tau);

// Runs the traversal below and discards the labels.
bool is_acyclic(const BipartiteGraph& g);

// Cycle detection and vertex labeling in a single iterative depth-first
// traversal. Each component is rooted at its lowest-numbered left-side
// vertex, which makes the labels deterministic. A vertex gets a 1 bit when
// its distance from the root is 1 or 2 mod 4; isolated vertices get 0.
// For every edge the xor of its endpoint bits then tells which endpoint is
// farther from the root, which is what makes the slot map injective.
//
// Scratch arrays are kept between calls so one labeler can process a long
// sequence of buckets without reallocating.
class GraphLabeler {
  public:
    // Returns false if the graph has a cycle (including repeated edges).
    // On success resizes and fills select_bits with the 2*tau vertex labels.
    bool label(const BipartiteGraph& g, BitVec& select_bits);

  private:
    // CSR adjacency, rebuilt per call.
    std::vector<uint32_t> adj_offsets_;
    std::vector<uint32_t> adj_vertex_;
    std::vector<uint32_t> adj_edge_;
    std::vector<uint32_t> depth_;
    std::vector<uint8_t> visited_;
    std::vector<uint32_t> stack_;
    std::vector<uint32_t> stack_edge_;
};

}  // namespace mphb
