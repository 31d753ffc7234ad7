#include "mphb/graph.hpp"

namespace mphb {

BipartiteGraph build_graph(std::span<const HashPair> pairs, uint64_t tau) {
    BipartiteGraph g;
    g.tau = tau;
    g.edges.reserve(pairs.size());
    for (const auto& [f0, f1] : pairs) {
        g.edges.push_back({f0, static_cast<uint32_t>(tau + f1)});
    }
    return g;
}

bool is_acyclic(const BipartiteGraph& g) {
    GraphLabeler labeler;
    BitVec bits;
    return labeler.label(g, bits);
}

bool GraphLabeler::label(const BipartiteGraph& g, BitVec& select_bits) {
    const uint64_t vertex_count = 2 * g.tau;
    const uint32_t edge_count = static_cast<uint32_t>(g.edges.size());

    adj_offsets_.assign(vertex_count + 1, 0);
    for (const auto& e : g.edges) {
        ++adj_offsets_[e.left + 1];
        ++adj_offsets_[e.right + 1];
    }
    for (uint64_t v = 0; v < vertex_count; ++v) adj_offsets_[v + 1] += adj_offsets_[v];

    adj_vertex_.resize(2 * std::size_t{edge_count});
    adj_edge_.resize(2 * std::size_t{edge_count});
    {
        std::vector<uint32_t>& cursor = depth_;  // reuse as scratch before depths are needed
        cursor.assign(adj_offsets_.begin(), adj_offsets_.end() - 1);
        for (uint32_t e = 0; e < edge_count; ++e) {
            const auto& edge = g.edges[e];
            adj_vertex_[cursor[edge.left]] = edge.right;
            adj_edge_[cursor[edge.left]++] = e;
            adj_vertex_[cursor[edge.right]] = edge.left;
            adj_edge_[cursor[edge.right]++] = e;
        }
    }

    depth_.assign(vertex_count, 0);
    visited_.assign(vertex_count, 0);
    constexpr uint32_t kNoEdge = UINT32_MAX;

    for (uint64_t root = 0; root < g.tau; ++root) {
        if (visited_[root] || adj_offsets_[root] == adj_offsets_[root + 1]) continue;
        visited_[root] = 1;
        stack_.assign(1, static_cast<uint32_t>(root));
        stack_edge_.assign(1, kNoEdge);
        while (!stack_.empty()) {
            const uint32_t v = stack_.back();
            const uint32_t parent_edge = stack_edge_.back();
            stack_.pop_back();
            stack_edge_.pop_back();
            bool parent_skipped = false;
            for (uint32_t k = adj_offsets_[v]; k < adj_offsets_[v + 1]; ++k) {
                const uint32_t e = adj_edge_[k];
                if (e == parent_edge && !parent_skipped) {
                    parent_skipped = true;
                    continue;
                }
                const uint32_t w = adj_vertex_[k];
                if (visited_[w]) return false;  // second path to w: a cycle
                visited_[w] = 1;
                depth_[w] = depth_[v] + 1;
                stack_.push_back(w);
                stack_edge_.push_back(e);
            }
        }
    }

    select_bits = BitVec(vertex_count);
    for (uint64_t v = 0; v < vertex_count; ++v) {
        const uint32_t m = depth_[v] & 3;
        if (m == 1 || m == 2) select_bits.set(v);
    }
    return true;
}

}  // namespace mphb
