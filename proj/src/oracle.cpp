#include "tokendrop/oracle.hpp"

#include <algorithm>
#include <bit>
#include <set>

#include "tokendrop/errors.hpp"

namespace tokendrop::oracle {

CostProfile cost_profile(const HyperOrientation& h) {
    CostProfile profile;
    profile.loads.reserve(h.instance().server_count());
    for (NodeId s : h.instance().servers()) {
        int load = h.load(s);
        profile.loads.push_back(load);
        profile.cost += load_cost(load);
    }
    std::sort(profile.loads.rbegin(), profile.loads.rend());
    return profile;
}

std::int64_t semi_matching_cost(const HyperOrientation& h) { return cost_profile(h).cost; }

std::int64_t squared_indegree_potential(const OrientationState& o) {
    std::int64_t sum = 0;
    for (NodeId v : o.graph().nodes())
        sum += static_cast<std::int64_t>(o.load(v)) * o.load(v);
    return sum;
}

OrientationState sequential_stable_orientation(
    const UndirectedGraph& g, OrientationState initial,
    const std::function<void(std::int64_t, std::int64_t)>& on_flip) {
    if (!(initial.graph() == g)) throw InvariantViolation("orientation belongs to another graph");
    if (!initial.fully_oriented())
        throw InvariantViolation("sequential local search needs a complete orientation");

    OrientationState o = std::move(initial);
    // Flip the lexicographically smallest unhappy edge until none is left.
    // The squared-indegree potential strictly decreases with every flip.
    while (true) {
        bool flipped = false;
        for (const auto& [a, b] : g.edges()) {
            NodeId head = *o.head(a, b);
            NodeId tail = head == a ? b : a;
            if (o.load(head) <= o.load(tail) + 1) continue;
            std::int64_t before = squared_indegree_potential(o);
            o.flip(a, b);
            std::int64_t after = squared_indegree_potential(o);
            if (after >= before)
                throw InvariantViolation("flip failed to lower the potential");
            if (on_flip) on_flip(before, after);
            flipped = true;
            break;
        }
        if (!flipped) return o;
    }
}

TraversalSet sequential_token_drop(const TokenDropInstance& instance) {
    std::set<NodeId> occupied(instance.tokens().begin(), instance.tokens().end());
    std::set<Edge> consumed;
    std::map<NodeId, Traversal> paths;  // keyed by current token position
    for (NodeId v : instance.tokens()) paths.emplace(v, Traversal{v});

    // Repeatedly move the lowest-id movable token one step to its lowest-id
    // open child.
    while (true) {
        bool moved = false;
        for (auto it = paths.begin(); it != paths.end(); ++it) {
            NodeId at = it->first;
            NodeId target = -1;
            for (NodeId child : instance.children(at)) {
                if (occupied.count(child) || consumed.count({child, at})) continue;
                target = child;
                break;
            }
            if (target < 0) continue;
            Traversal path = std::move(it->second);
            paths.erase(it);
            consumed.insert({target, at});
            occupied.erase(at);
            occupied.insert(target);
            path.push_back(target);
            paths.emplace(target, std::move(path));
            moved = true;
            break;
        }
        if (!moved) break;
    }

    TraversalSet out;
    for (auto& [at, path] : paths) out.traversals.push_back(std::move(path));
    std::sort(out.traversals.begin(), out.traversals.end(),
              [](const Traversal& a, const Traversal& b) { return a.front() < b.front(); });
    out.node_centered = project_node_centered(out.traversals);
    return out;
}

namespace {

// Walks all 2^|E| orientations in Gray-code order, maintaining indegrees and
// the number of unhappy edges incrementally. Bit i set = edge i points at its
// smaller endpoint.
template <typename OnStable>
void sweep_orientations(const UndirectedGraph& g, const OnStable& on_stable) {
    const int m = g.edge_count();
    if (m > 24) throw TooLarge("orientation enumeration budget is 2^24 edges, graph has " +
                               std::to_string(m));
    const int n = g.node_count();

    std::vector<int> indeg(n, 0);
    std::vector<char> unhappy(m, 0);
    std::vector<std::pair<int, int>> ends(m);  // (index of first, index of second)
    std::vector<std::vector<int>> incident(n);  // edge ids per node
    for (int e = 0; e < m; ++e) {
        const auto& [a, b] = g.edges()[e];
        ends[e] = {g.index_of(a), g.index_of(b)};
        incident[ends[e].first].push_back(e);
        incident[ends[e].second].push_back(e);
    }
    // Start: all edges point at their larger endpoint (mask 0).
    for (int e = 0; e < m; ++e) ++indeg[ends[e].second];
    int unhappy_count = 0;
    auto head_tail = [&](int e, std::uint32_t mask) {
        return (mask >> e) & 1u ? std::pair(ends[e].first, ends[e].second)
                                : std::pair(ends[e].second, ends[e].first);
    };
    auto refresh = [&](int e, std::uint32_t mask) {
        auto [h, t] = head_tail(e, mask);
        char bad = indeg[h] > indeg[t] + 1;
        unhappy_count += bad - unhappy[e];
        unhappy[e] = bad;
    };
    for (int e = 0; e < m; ++e) refresh(e, 0);

    std::uint32_t mask = 0;
    if (unhappy_count == 0) on_stable(mask);
    const std::uint64_t total = 1ull << m;
    for (std::uint64_t k = 1; k < total; ++k) {
        int e = std::countr_zero(k);  // Gray code: flip edge e
        auto [h_old, t_old] = head_tail(e, mask);
        mask ^= 1u << e;
        --indeg[h_old];
        ++indeg[t_old];
        for (int other : incident[h_old]) refresh(other, mask);
        for (int other : incident[t_old]) refresh(other, mask);
        if (unhappy_count == 0) on_stable(mask);
    }
}

OrientationState orientation_from_mask(const UndirectedGraph& g,
                                       std::shared_ptr<const UndirectedGraph> shared,
                                       std::uint32_t mask) {
    OrientationState o(shared);
    for (int e = 0; e < g.edge_count(); ++e) {
        const auto& [a, b] = g.edges()[e];
        o.orient((mask >> e) & 1u ? b : a, (mask >> e) & 1u ? a : b);
    }
    return o;
}

std::uint32_t mask_from_orientation(const OrientationState& o) {
    std::uint32_t mask = 0;
    const auto& g = o.graph();
    for (int e = 0; e < g.edge_count(); ++e) {
        const auto& [a, b] = g.edges()[e];
        auto h = o.head(a, b);
        if (!h) throw InvariantViolation("candidate orientation is incomplete");
        if (*h == a) mask |= 1u << e;
    }
    return mask;
}

}  // namespace

std::vector<OrientationState> enumerate_stable_orientations(const UndirectedGraph& g) {
    auto shared = std::make_shared<UndirectedGraph>(g);
    std::vector<OrientationState> out;
    sweep_orientations(g, [&](std::uint32_t mask) {
        out.push_back(orientation_from_mask(g, shared, mask));
    });
    return out;
}

StableOrientationStats stable_orientation_stats(const UndirectedGraph& g,
                                                const OrientationState* candidate) {
    StableOrientationStats stats;
    std::uint32_t wanted = candidate ? mask_from_orientation(*candidate) : 0;
    sweep_orientations(g, [&](std::uint32_t mask) {
        ++stats.stable_count;
        if (candidate && mask == wanted) stats.contains_candidate = true;
    });
    return stats;
}

std::pair<HyperOrientation, CostProfile> brute_force_optimal_semi_matching(
    const AssignmentInstance& instance) {
    constexpr std::int64_t kBudget = 10'000'000;
    std::int64_t combos = 1;
    for (const auto& c : instance.customers()) {
        combos *= static_cast<std::int64_t>(c.servers.size());
        if (combos > kBudget)
            throw TooLarge("assignment enumeration exceeds " + std::to_string(kBudget) +
                           " combinations");
    }

    auto shared = std::make_shared<AssignmentInstance>(instance);
    const int nc = instance.customer_count();
    std::vector<int> choice(nc, 0);
    std::vector<int> loads(instance.server_count(), 0);
    std::int64_t cost = 0;
    auto server_idx = [&](int c, int i) {
        return instance.server_index(instance.customers()[c].servers[i]);
    };
    for (int c = 0; c < nc; ++c) {
        int s = server_idx(c, 0);
        cost += loads[s] + 1;
        ++loads[s];
    }

    std::int64_t best_cost = cost;
    std::vector<int> best_choice = choice;
    // Odometer over the choice vector, updating the cost incrementally.
    while (true) {
        int c = 0;
        for (; c < nc; ++c) {
            int old_s = server_idx(c, choice[c]);
            cost -= loads[old_s];
            --loads[old_s];
            if (choice[c] + 1 < static_cast<int>(instance.customers()[c].servers.size())) {
                ++choice[c];
                int s = server_idx(c, choice[c]);
                cost += loads[s] + 1;
                ++loads[s];
                break;
            }
            choice[c] = 0;
            int s = server_idx(c, 0);
            cost += loads[s] + 1;
            ++loads[s];
        }
        if (c == nc) break;  // odometer wrapped
        if (cost < best_cost) {
            best_cost = cost;
            best_choice = choice;
        }
    }

    HyperOrientation best(shared);
    for (int c = 0; c < nc; ++c) {
        const auto& cust = instance.customers()[c];
        best.assign(cust.id, cust.servers[best_choice[c]]);
    }
    return {best, cost_profile(best)};
}

MatchingReport maximality_check(const std::vector<Edge>& matching, const UndirectedGraph& g) {
    std::set<NodeId> covered;
    for (const auto& [a, b] : matching) {
        if (!g.has_edge(a, b))
            return {false, false, "(" + std::to_string(a) + ", " + std::to_string(b) + ")",
                    "matching uses a non-edge"};
        if (!covered.insert(a).second)
            return {false, false, std::to_string(a),
                    "node " + std::to_string(a) + " is matched twice"};
        if (!covered.insert(b).second)
            return {false, false, std::to_string(b),
                    "node " + std::to_string(b) + " is matched twice"};
    }
    for (const auto& [a, b] : g.edges()) {
        if (!covered.count(a) && !covered.count(b))
            return {false, true, "(" + std::to_string(a) + ", " + std::to_string(b) + ")",
                    "edge (" + std::to_string(a) + ", " + std::to_string(b) +
                        ") could still be added"};
    }
    return {};
}

}  // namespace tokendrop::oracle
