#include "tokendrop/graph.hpp"

#include <algorithm>

#include "tokendrop/errors.hpp"

namespace tokendrop {

UndirectedGraph UndirectedGraph::create(std::vector<NodeId> nodes, std::vector<Edge> edges) {
    UndirectedGraph g;
    std::sort(nodes.begin(), nodes.end());
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        if (nodes[i] == nodes[i - 1])
            throw InvariantViolation("duplicate node id " + std::to_string(nodes[i]));
    }
    g.nodes_ = std::move(nodes);
    for (int i = 0; i < static_cast<int>(g.nodes_.size()); ++i) g.index_.emplace(g.nodes_[i], i);

    for (auto& e : edges) {
        if (e.first == e.second)
            throw InvariantViolation("self-loop at node " + std::to_string(e.first));
        if (!g.has_node(e.first) || !g.has_node(e.second))
            throw InvariantViolation("edge (" + std::to_string(e.first) + ", " +
                                     std::to_string(e.second) + ") references an unknown node");
        e = normalize_edge(e.first, e.second);
    }
    std::sort(edges.begin(), edges.end());
    for (std::size_t i = 1; i < edges.size(); ++i) {
        if (edges[i] == edges[i - 1])
            throw InvariantViolation("parallel edge (" + std::to_string(edges[i].first) + ", " +
                                     std::to_string(edges[i].second) + ")");
    }
    g.edges_ = std::move(edges);

    g.adjacency_.resize(g.nodes_.size());
    for (const auto& [a, b] : g.edges_) {
        g.adjacency_[g.index_.at(a)].push_back(b);
        g.adjacency_[g.index_.at(b)].push_back(a);
    }
    for (auto& adj : g.adjacency_) {
        std::sort(adj.begin(), adj.end());
        g.max_degree_ = std::max(g.max_degree_, static_cast<int>(adj.size()));
    }
    return g;
}

bool UndirectedGraph::has_edge(NodeId a, NodeId b) const {
    if (!has_node(a) || !has_node(b)) return false;
    const auto& adj = adjacency_[index_.at(a)];
    return std::binary_search(adj.begin(), adj.end(), b);
}

int UndirectedGraph::index_of(NodeId v) const {
    auto it = index_.find(v);
    if (it == index_.end())
        throw InvariantViolation("unknown node id " + std::to_string(v));
    return it->second;
}

}  // namespace tokendrop
