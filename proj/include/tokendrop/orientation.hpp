#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tokendrop/graph.hpp"
#include "tokendrop/instances.hpp"
#include "tokendrop/sim/engine.hpp"
#include "tokendrop/token_game.hpp"

namespace tokendrop {

// Orientation of a subset of a graph's edges; load(v) = indegree(v).
class OrientationState {
public:
    OrientationState() = default;
    explicit OrientationState(std::shared_ptr<const UndirectedGraph> base);
    explicit OrientationState(const UndirectedGraph& base);

    const UndirectedGraph& graph() const { return *base_; }
    std::shared_ptr<const UndirectedGraph> graph_ptr() const { return base_; }

    bool is_oriented(NodeId a, NodeId b) const;
    // Head of an oriented edge, or nullopt while unoriented.
    std::optional<NodeId> head(NodeId a, NodeId b) const;

    void orient(NodeId tail, NodeId head);  // edge must be unoriented
    void flip(NodeId a, NodeId b);          // edge must be oriented

    int load(NodeId v) const { return loads_[base_->index_of(v)]; }
    int oriented_count() const { return oriented_count_; }
    bool fully_oriented() const { return oriented_count_ == base_->edge_count(); }

    // Heads in base edge order; nullopt for unoriented edges.
    std::vector<std::optional<NodeId>> heads() const;

    bool operator==(const OrientationState& other) const;

private:
    int edge_index(NodeId a, NodeId b) const;

    std::shared_ptr<const UndirectedGraph> base_;
    // 0 = unoriented, 1 = toward edge.first, 2 = toward edge.second
    std::vector<std::uint8_t> status_;
    std::vector<int> loads_;
    int oriented_count_ = 0;
};

// indegree(head) <= indegree(tail) + 1. Throws InvariantViolation when the
// edge is unoriented.
bool is_happy(const OrientationState& o, NodeId tail, NodeId head);

// indegree(head) - indegree(tail); the edge is happy iff badness <= 1.
int badness(const OrientationState& o, NodeId tail, NodeId head);

// All edges oriented and happy. Throws on incomplete orientations.
bool is_stable(const OrientationState& o);

struct StabilityReport {
    bool ok = true;
    std::string witness;  // unhappy or unoriented edge
    std::string message;
    explicit operator bool() const { return ok; }
};

StabilityReport check_stable(const OrientationState& o);

struct PhaseRecord {
    int phase = 0;
    int proposals_made = 0;
    int proposals_accepted = 0;
    int edges_flipped = 0;
    int edges_newly_oriented = 0;
    int game_height = 0;
    sim::SimReport game_report;  // rounds/messages inside the game window
};

// Pure per-phase steps, shared by the node program's contract and the
// centralized cross-check that replays each phase.

// Accepted proposals for this phase: for each accepting node, the unoriented
// edge that will be oriented toward it (proposal from the smaller-load
// endpoint rule, acceptance by lowest proposer id).
std::vector<std::pair<NodeId, NodeId>> propose_orientations(const OrientationState& o,
                                                            int* proposals_made = nullptr);

// Game over the directed edges of badness exactly 1; levels are loads and
// accepting nodes hold the tokens. Heights never exceed the max degree.
TokenDropInstance build_token_instance(const OrientationState& o,
                                       const std::vector<std::pair<NodeId, NodeId>>& accepted);

// Flips every edge on a traversal.
void apply_flips(OrientationState& o, const std::vector<Traversal>& traversals);

// Orients each accepted edge toward its accepting endpoint.
void commit_orientations(OrientationState& o,
                         const std::vector<std::pair<NodeId, NodeId>>& accepted);

struct OrientationRun {
    OrientationState orientation;
    std::vector<PhaseRecord> phases;
    sim::SimReport report;
};

// Distributed phase algorithm: orient a few edges per phase and rebalance the
// new load with an embedded token game so no edge ever exceeds badness 1.
// The result is validated phase by phase against the pure steps above.
OrientationRun run_stable_orientation(const UndirectedGraph& g);

}  // namespace tokendrop
