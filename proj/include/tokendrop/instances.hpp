#pragma once

#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "tokendrop/graph.hpp"

namespace tokendrop {

// Layered game instance. Directed edges run child -> parent, one level apart;
// each node holds at most one token. Nodes never see their own level.
class TokenDropInstance {
public:
    TokenDropInstance() = default;

    // `edges` are (child, parent) pairs. Height defaults to max(1, max level).
    static TokenDropInstance create(std::vector<NodeId> nodes,
                                    std::vector<Edge> child_parent_edges,
                                    std::vector<std::pair<NodeId, int>> levels,
                                    std::vector<NodeId> tokens,
                                    std::optional<int> declared_height = std::nullopt);

    int node_count() const { return static_cast<int>(nodes_.size()); }
    std::span<const NodeId> nodes() const { return nodes_; }
    std::span<const Edge> edges() const { return edges_; }  // (child, parent), sorted
    std::span<const NodeId> tokens() const { return tokens_; }

    int height() const { return height_; }
    int level(NodeId v) const { return levels_[index_of(v)]; }
    bool has_token(NodeId v) const;

    int index_of(NodeId v) const;
    std::span<const NodeId> parents(NodeId v) const { return parents_[index_of(v)]; }
    std::span<const NodeId> children(NodeId v) const { return children_[index_of(v)]; }
    int degree(NodeId v) const {
        int i = index_of(v);
        return static_cast<int>(parents_[i].size() + children_[i].size());
    }
    int max_degree() const { return max_degree_; }
    int token_count() const { return static_cast<int>(tokens_.size()); }

    bool operator==(const TokenDropInstance& other) const {
        return nodes_ == other.nodes_ && edges_ == other.edges_ &&
               levels_ == other.levels_ && tokens_ == other.tokens_ &&
               height_ == other.height_;
    }

private:
    std::vector<NodeId> nodes_;   // sorted
    std::vector<Edge> edges_;     // sorted (child, parent)
    std::vector<int> levels_;     // by node index
    std::vector<NodeId> tokens_;  // sorted
    std::vector<std::vector<NodeId>> parents_;   // by node index, sorted
    std::vector<std::vector<NodeId>> children_;  // by node index, sorted
    std::unordered_map<NodeId, int> index_;
    int height_ = 1;
    int max_degree_ = 0;
};

// Perfect d-regular rooted tree of depth k with per-node heights
// (distance to the closest leaf).
struct RegularTree {
    UndirectedGraph graph;
    NodeId root = 0;
    int degree = 0;
    int depth = 0;
    std::vector<int> heights;  // by graph node index

    int height(NodeId v) const { return heights[graph.index_of(v)]; }
};

// Bipartite customer/server instance; a customer is a hyperedge over its
// adjacent servers.
class AssignmentInstance {
public:
    struct Customer {
        NodeId id = 0;
        std::vector<NodeId> servers;  // sorted, distinct, non-empty
    };

    AssignmentInstance() = default;

    static AssignmentInstance create(std::vector<NodeId> servers,
                                     std::vector<Customer> customers);

    std::span<const NodeId> servers() const { return servers_; }
    std::span<const Customer> customers() const { return customers_; }
    int server_count() const { return static_cast<int>(servers_.size()); }
    int customer_count() const { return static_cast<int>(customers_.size()); }

    int customer_index(NodeId id) const;
    int server_index(NodeId id) const;

    // Max customer degree (rank) and max server degree.
    int max_customer_degree() const { return max_customer_degree_; }
    int max_server_degree() const { return max_server_degree_; }
    int server_degree(NodeId s) const { return server_degrees_[server_index(s)]; }

    bool operator==(const AssignmentInstance& other) const {
        if (servers_ != other.servers_ || customers_.size() != other.customers_.size())
            return false;
        for (std::size_t i = 0; i < customers_.size(); ++i) {
            if (customers_[i].id != other.customers_[i].id ||
                customers_[i].servers != other.customers_[i].servers)
                return false;
        }
        return true;
    }

private:
    std::vector<NodeId> servers_;      // sorted
    std::vector<Customer> customers_;  // sorted by id
    std::vector<int> server_degrees_;  // by server index
    std::unordered_map<NodeId, int> server_index_;
    std::unordered_map<NodeId, int> customer_index_;
    int max_customer_degree_ = 0;
    int max_server_degree_ = 0;
};

}  // namespace tokendrop
