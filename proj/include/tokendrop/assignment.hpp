#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tokendrop/instances.hpp"
#include "tokendrop/sim/engine.hpp"

namespace tokendrop {

// Per-customer server choice over an assignment instance; load(s) counts the
// customers whose head is s.
class HyperOrientation {
public:
    HyperOrientation() = default;
    explicit HyperOrientation(std::shared_ptr<const AssignmentInstance> instance);
    explicit HyperOrientation(const AssignmentInstance& instance);

    const AssignmentInstance& instance() const { return *instance_; }
    std::shared_ptr<const AssignmentInstance> instance_ptr() const { return instance_; }

    bool is_assigned(NodeId customer) const;
    std::optional<NodeId> head(NodeId customer) const;
    void assign(NodeId customer, NodeId server);    // must be adjacent
    void reassign(NodeId customer, NodeId server);  // move head
    void clear(NodeId customer);

    int load(NodeId server) const { return loads_[instance_->server_index(server)]; }
    int assigned_count() const { return assigned_count_; }
    bool fully_assigned() const { return assigned_count_ == instance_->customer_count(); }

    // Heads in instance customer order; nullopt while unassigned.
    std::vector<std::optional<NodeId>> heads() const;

    bool operator==(const HyperOrientation& other) const;

private:
    std::shared_ptr<const AssignmentInstance> instance_;
    std::vector<int> head_;  // server index or -1, by customer index
    std::vector<int> loads_;
    int assigned_count_ = 0;
};

// load(head) minus the smallest load among the customer's other servers; a
// single-server customer has badness 0. Throws when unassigned.
int hyper_badness(const HyperOrientation& h, NodeId customer);

// Every customer assigned with badness <= 1: no customer can strictly lower
// its server's load by switching.
bool is_hyper_stable(const HyperOrientation& h);

struct HyperStabilityReport {
    bool ok = true;
    std::string witness;
    std::string message;
    explicit operator bool() const { return ok; }
};

HyperStabilityReport check_hyper_stable(const HyperOrientation& h);

// Token game over hyperedges: servers carry levels and tokens, customers are
// hyperedges with a designated head one level above the lowest endpoint.
class HyperTokenInstance {
public:
    struct Hyperedge {
        std::int64_t id = 0;
        NodeId head = 0;
        std::vector<NodeId> endpoints;  // sorted, includes head
    };

    HyperTokenInstance() = default;
    static HyperTokenInstance create(std::vector<NodeId> nodes,
                                     std::vector<std::pair<NodeId, int>> levels,
                                     std::vector<Hyperedge> edges,
                                     std::vector<NodeId> tokens);

    std::span<const NodeId> nodes() const { return nodes_; }
    std::span<const Hyperedge> edges() const { return edges_; }
    std::span<const NodeId> tokens() const { return tokens_; }
    int level(NodeId v) const { return levels_[index_of(v)]; }
    bool has_token(NodeId v) const;
    int index_of(NodeId v) const;
    int height() const { return height_; }
    int max_node_degree() const { return max_node_degree_; }  // hyperedges per node

    // Children of the head within edge e: endpoints one level below the head.
    std::vector<NodeId> children(const Hyperedge& e) const;

private:
    std::vector<NodeId> nodes_;
    std::vector<int> levels_;
    std::vector<Hyperedge> edges_;  // sorted by id
    std::vector<NodeId> tokens_;
    std::unordered_map<NodeId, int> index_;
    int height_ = 1;
    int max_node_degree_ = 0;
};

// Hyper traversal: nodes interleaved with the hyperedge ids used to hop.
struct HyperTraversal {
    std::vector<NodeId> path;
    std::vector<std::int64_t> edges;  // path.size() - 1 entries
};

struct HyperGameRun {
    std::vector<HyperTraversal> traversals;  // one per token, sorted by origin
    sim::SimReport report;
};

struct HyperValidation {
    bool ok = true;
    std::string rule;
    std::string witness;
    std::string message;
    explicit operator bool() const { return ok; }
};

HyperValidation validate_hyper_traversals(const HyperTokenInstance& instance,
                                          const std::vector<HyperTraversal>& out);

// Proposal algorithm over hyperedges; at most 2*L*S^2 + 2L + 4 rounds where S
// is the max number of hyperedges per node.
HyperGameRun run_hyper_token_drop(const HyperTokenInstance& instance);

struct AssignmentRun {
    HyperOrientation assignment;
    sim::SimReport report;
};

// Phase algorithm for stable assignments: unoriented customers propose to
// their least-loaded server, accepted proposals become tokens of an embedded
// hyperedge game, and heads flip along the traversals.
AssignmentRun run_stable_assignment(const AssignmentInstance& instance);

// A customer is content unless some adjacent server's load is at most
// min(k, load(head)) - 2. Requires k >= 2 and an assigned customer.
bool is_k_bounded_happy(const HyperOrientation& h, NodeId customer, int k);

struct TwoBoundedRun {
    HyperOrientation assignment;
    sim::SimReport report;        // phases = redirect iterations
    std::vector<std::vector<int>> load_snapshots;  // per iteration boundary, by server index
};

// O(C)-round algorithm for the 2-bounded relaxation: servers redirect their
// discontent customers to zero-load servers, keeping one when all are
// discontent.
TwoBoundedRun run_two_bounded(const AssignmentInstance& instance);

// Reduction: customers on the left, servers on the right; each server keeps
// its lowest-id matched customer. Returns a maximal matching.
std::vector<Edge> maximal_matching_via_two_bounded(const UndirectedGraph& bipartite,
                                                   const std::vector<NodeId>& left_side);

}  // namespace tokendrop
