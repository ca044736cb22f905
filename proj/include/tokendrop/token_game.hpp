#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tokendrop/instances.hpp"
#include "tokendrop/sim/engine.hpp"

namespace tokendrop {

// Downward path of one token; length 1 means the token never moved.
using Traversal = std::vector<NodeId>;

// Per-node view of the solution: for each node, the (from, to) pairs of
// tokens that traveled through it, plus at most one outgoing singleton (a
// token that started here and left) and one incoming singleton (a token that
// arrived and stayed). A token that never moved leaves no record.
struct NodeCenteredEntry {
    std::vector<std::pair<NodeId, NodeId>> through;  // in emission order
    std::optional<NodeId> origin_out;
    std::optional<NodeId> destination_in;
};

using NodeCenteredOutput = std::map<NodeId, NodeCenteredEntry>;

struct TraversalSet {
    std::vector<Traversal> traversals;  // one per token, sorted by origin
    NodeCenteredOutput node_centered;
};

// Builds the node-centered projection of a set of traversals.
NodeCenteredOutput project_node_centered(const std::vector<Traversal>& traversals);

// Inverse of the projection: recovers one traversal per token of `instance`.
// Throws InvariantViolation when the form is locally inconsistent (dangling
// pairs, unknown edges, cycles).
std::vector<Traversal> derive_traversals(const NodeCenteredOutput& form,
                                         const TokenDropInstance& instance);

struct TraversalValidation {
    bool ok = true;
    std::string rule;     // "path", "edge-disjoint", "unique-destination", "maximal"
    std::string witness;  // offending edge or node
    std::string message;

    explicit operator bool() const { return ok; }
};

// Checks path validity (edges exist child->parent, one traversal per token)
// and the three game rules: edge-disjoint traversals, distinct destinations,
// and maximality of every traversal. Rejection is a value, not an error.
TraversalValidation validate_traversals(const TokenDropInstance& instance,
                                        const TraversalSet& out);

struct GameRun {
    TraversalSet solution;
    sim::SimReport report;
    // Requests sent per node (by instance node order); each one marks a
    // communication pair in which the node was active and unoccupied.
    std::vector<std::int64_t> requests_per_node;
};

// Distributed proposal algorithm: every active and unoccupied node requests a
// token from an occupied parent; a requested parent grants one child. Runs in
// at most 2*L*Delta^2 + 2L + 4 communication rounds.
GameRun run_proposal(const TokenDropInstance& instance);

struct ProposalTraceRow {
    std::int64_t round = 0;
    std::vector<char> occupied;  // by instance node order
};

// As run_proposal, but records per-round occupancy for progress analysis.
GameRun run_proposal_traced(const TokenDropInstance& instance,
                            std::vector<ProposalTraceRow>* trace);

// O(Delta)-round algorithm for games whose layers fit in {0, 1, 2}: layer-1
// nodes drive, requesting tokens from layer 2 and proposing them to layer 0.
// Each node is told its own layer. Throws InvariantViolation for games with
// more than three layers.
GameRun run_three_level(const TokenDropInstance& instance);

// Reduction: level-1 tokens over U, level-0 nodes over V; the resulting
// length-2 traversals form a maximal matching of the bipartite input.
std::vector<Edge> matching_via_token_drop(const UndirectedGraph& bipartite,
                                          const std::vector<NodeId>& left_side);

}  // namespace tokendrop
