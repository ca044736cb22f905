#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tokendrop {

using NodeId = std::int64_t;

using Edge = std::pair<NodeId, NodeId>;

// Normalizes an undirected edge so the smaller endpoint comes first.
inline Edge normalize_edge(NodeId a, NodeId b) {
    return a < b ? Edge{a, b} : Edge{b, a};
}

// Simple undirected graph: distinct node ids, no self-loops, no parallel
// edges. Immutable after construction.
class UndirectedGraph {
public:
    UndirectedGraph() = default;

    // Validates and canonicalizes; throws InvariantViolation on duplicate
    // ids, loops, parallel edges, or edges with unknown endpoints.
    static UndirectedGraph create(std::vector<NodeId> nodes, std::vector<Edge> edges);

    int node_count() const { return static_cast<int>(nodes_.size()); }
    int edge_count() const { return static_cast<int>(edges_.size()); }

    std::span<const NodeId> nodes() const { return nodes_; }
    std::span<const Edge> edges() const { return edges_; }  // sorted, first < second

    bool has_node(NodeId v) const { return index_.count(v) > 0; }
    bool has_edge(NodeId a, NodeId b) const;

    // Dense index of a node in nodes() order.
    int index_of(NodeId v) const;

    int degree(NodeId v) const { return static_cast<int>(adjacency_[index_of(v)].size()); }
    std::span<const NodeId> neighbors(NodeId v) const { return adjacency_[index_of(v)]; }
    int max_degree() const { return max_degree_; }

    bool operator==(const UndirectedGraph& other) const {
        return nodes_ == other.nodes_ && edges_ == other.edges_;
    }

private:
    std::vector<NodeId> nodes_;   // sorted
    std::vector<Edge> edges_;     // sorted
    std::vector<std::vector<NodeId>> adjacency_;  // by node index, sorted
    std::unordered_map<NodeId, int> index_;
    int max_degree_ = 0;
};

}  // namespace tokendrop
