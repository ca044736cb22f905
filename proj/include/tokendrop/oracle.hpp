#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tokendrop/assignment.hpp"
#include "tokendrop/instances.hpp"
#include "tokendrop/orientation.hpp"
#include "tokendrop/token_game.hpp"

namespace tokendrop::oracle {

// Server load profile with the semi-matching objective sum f(load),
// f(x) = 1 + 2 + ... + x = x(x+1)/2.
struct CostProfile {
    std::vector<int> loads;  // sorted descending
    std::int64_t cost = 0;
};

constexpr std::int64_t load_cost(std::int64_t x) { return x * (x + 1) / 2; }

CostProfile cost_profile(const HyperOrientation& h);
std::int64_t semi_matching_cost(const HyperOrientation& h);

// Flips the lexicographically smallest unhappy edge until stable. The sum of
// squared indegrees strictly decreases at every flip, which bounds the run;
// each flip is reported through `on_flip` (old potential, new potential).
OrientationState sequential_stable_orientation(
    const UndirectedGraph& g, OrientationState initial,
    const std::function<void(std::int64_t, std::int64_t)>& on_flip = {});

std::int64_t squared_indegree_potential(const OrientationState& o);

// Moves the lowest-id movable token one step down until the game is stuck.
TraversalSet sequential_token_drop(const TokenDropInstance& instance);

// All stable orientations of g; budget 2^|E| with |E| <= 24.
std::vector<OrientationState> enumerate_stable_orientations(const UndirectedGraph& g);

struct StableOrientationStats {
    std::int64_t stable_count = 0;
    bool contains_candidate = false;
};

// Counting twin of the enumeration that never materializes the list; the
// candidate (if given) is looked up during the same sweep.
StableOrientationStats stable_orientation_stats(const UndirectedGraph& g,
                                                const OrientationState* candidate = nullptr);

// Exhaustive optimum of the semi-matching objective; budget: the product of
// customer degrees must stay within 10^7 combinations.
std::pair<HyperOrientation, CostProfile> brute_force_optimal_semi_matching(
    const AssignmentInstance& instance);

struct MatchingReport {
    bool ok = true;
    bool is_matching = true;
    std::string witness;
    std::string message;
    explicit operator bool() const { return ok; }
};

// True iff `matching` is a matching of g and no edge of g can be added.
MatchingReport maximality_check(const std::vector<Edge>& matching, const UndirectedGraph& g);

}  // namespace tokendrop::oracle
