#include "tokendrop/generators.hpp"

#include <algorithm>
#include <string>

#include "tokendrop/errors.hpp"
#include "tokendrop/rng.hpp"

namespace tokendrop {

TokenDropInstance gen_layered_dag(int levels, int max_degree, int nodes_per_level,
                                  double edge_density, double token_density,
                                  std::uint64_t seed) {
    if (levels < 1 || max_degree < 1 || nodes_per_level < 1)
        throw InvalidParameters("gen_layered_dag requires levels >= 1, max_degree >= 1, "
                                "nodes_per_level >= 1");
    if (edge_density < 0.0 || edge_density > 1.0 || token_density < 0.0 || token_density > 1.0)
        throw InvalidParameters("densities must lie in [0, 1]");
    // Interior nodes split their degree budget between the two adjacent
    // layers; with max_degree 1 and two or more interior boundaries there is
    // no split that admits edges on both sides.
    if (edge_density > 0.0 && max_degree == 1 && levels >= 2)
        throw InvalidParameters("edge density " + std::to_string(edge_density) +
                                " cannot respect max degree 1 across " +
                                std::to_string(levels + 1) + " layers");

    Rng rng(seed);
    const int npl = nodes_per_level;
    auto node_at = [&](int level, int i) { return static_cast<NodeId>(level) * npl + i; };

    std::vector<NodeId> nodes;
    std::vector<std::pair<NodeId, int>> level_of;
    for (int l = 0; l <= levels; ++l) {
        for (int i = 0; i < npl; ++i) {
            nodes.push_back(node_at(l, i));
            level_of.emplace_back(node_at(l, i), l);
        }
    }

    auto up_cap = [&](int level) {
        if (level == levels) return 0;
        return level == 0 ? max_degree : (max_degree + 1) / 2;
    };
    auto down_cap = [&](int level) {
        if (level == 0) return 0;
        return level == levels ? max_degree : max_degree / 2;
    };

    std::vector<int> up_deg(nodes.size(), 0), down_deg(nodes.size(), 0);
    std::vector<Edge> edges;
    for (int l = 0; l + 1 <= levels; ++l) {
        std::vector<std::pair<int, int>> candidates;
        candidates.reserve(static_cast<std::size_t>(npl) * npl);
        for (int i = 0; i < npl; ++i)
            for (int j = 0; j < npl; ++j) candidates.emplace_back(i, j);
        rng.shuffle(candidates);
        for (const auto& [i, j] : candidates) {
            NodeId child = node_at(l, i);
            NodeId parent = node_at(l + 1, j);
            bool take = rng.chance(edge_density);
            if (!take) continue;
            std::size_t ci = static_cast<std::size_t>(child);
            std::size_t pi = static_cast<std::size_t>(parent);
            if (up_deg[ci] >= up_cap(l) || down_deg[pi] >= down_cap(l + 1)) continue;
            ++up_deg[ci];
            ++down_deg[pi];
            edges.emplace_back(child, parent);
        }
    }

    std::vector<NodeId> tokens;
    for (NodeId v : nodes)
        if (rng.chance(token_density)) tokens.push_back(v);

    return TokenDropInstance::create(std::move(nodes), std::move(edges), std::move(level_of),
                                     std::move(tokens), levels);
}

RegularTree gen_perfect_regular_tree(int degree, int depth) {
    if (degree < 2 || depth < 1)
        throw InvalidParameters("gen_perfect_regular_tree requires degree >= 2, depth >= 1");

    RegularTree tree;
    tree.degree = degree;
    tree.depth = depth;
    tree.root = 0;

    std::vector<NodeId> nodes{0};
    std::vector<Edge> edges;
    std::vector<int> depth_of{0};
    std::vector<NodeId> frontier{0};
    NodeId next = 1;
    for (int level = 1; level <= depth; ++level) {
        std::vector<NodeId> fresh;
        for (NodeId parent : frontier) {
            int fanout = (parent == 0) ? degree : degree - 1;
            for (int c = 0; c < fanout; ++c) {
                nodes.push_back(next);
                depth_of.push_back(level);
                edges.emplace_back(parent, next);
                fresh.push_back(next++);
            }
        }
        frontier = std::move(fresh);
    }

    tree.graph = UndirectedGraph::create(std::move(nodes), std::move(edges));
    tree.heights.resize(depth_of.size());
    for (std::size_t i = 0; i < depth_of.size(); ++i)
        tree.heights[tree.graph.index_of(static_cast<NodeId>(i))] = depth - depth_of[i];
    return tree;
}

UndirectedGraph gen_random_regular(int n, int d, std::uint64_t seed) {
    if (n < 1 || d < 0 || d >= n)
        throw InvalidParameters("gen_random_regular requires 0 <= d < n");
    if ((static_cast<std::int64_t>(n) * d) % 2 != 0)
        throw InvalidParameters("n * d must be even");

    Rng rng(seed);
    constexpr int kRetryBudget = 100;
    std::vector<int> stubs;
    stubs.reserve(static_cast<std::size_t>(n) * d);
    for (int attempt = 0; attempt < kRetryBudget; ++attempt) {
        stubs.clear();
        for (int v = 0; v < n; ++v)
            for (int i = 0; i < d; ++i) stubs.push_back(v);
        rng.shuffle(stubs);

        std::vector<Edge> edges;
        bool simple = true;
        for (std::size_t i = 0; i + 1 < stubs.size() && simple; i += 2) {
            if (stubs[i] == stubs[i + 1]) simple = false;
            else edges.push_back(normalize_edge(stubs[i], stubs[i + 1]));
        }
        if (!simple) continue;
        std::sort(edges.begin(), edges.end());
        if (std::adjacent_find(edges.begin(), edges.end()) != edges.end()) continue;

        std::vector<NodeId> nodes(n);
        for (int v = 0; v < n; ++v) nodes[v] = v;
        return UndirectedGraph::create(std::move(nodes), std::move(edges));
    }
    throw GenerationFailure("no simple " + std::to_string(d) + "-regular pairing on " +
                            std::to_string(n) + " nodes after " + std::to_string(kRetryBudget) +
                            " attempts");
}

AssignmentInstance gen_bipartite_assignment(int num_customers, int num_servers,
                                            int max_customer_degree, int max_server_degree,
                                            std::uint64_t seed) {
    if (num_customers < 0 || num_servers < 1 || max_customer_degree < 1 || max_server_degree < 1)
        throw InvalidParameters("gen_bipartite_assignment requires positive caps and servers");
    std::int64_t capacity = static_cast<std::int64_t>(num_servers) * max_server_degree;
    if (num_customers > capacity)
        throw InvalidParameters("cannot place " + std::to_string(num_customers) +
                                " customers on " + std::to_string(num_servers) +
                                " servers with server degree cap " +
                                std::to_string(max_server_degree));

    Rng rng(seed);
    std::vector<NodeId> servers(num_servers);
    for (int s = 0; s < num_servers; ++s) servers[s] = s;
    std::vector<int> remaining(num_servers, max_server_degree);
    std::int64_t total_remaining = capacity;

    std::vector<AssignmentInstance::Customer> customers;
    customers.reserve(num_customers);
    for (int c = 0; c < num_customers; ++c) {
        NodeId id = num_servers + c;
        std::vector<int> available;
        for (int s = 0; s < num_servers; ++s)
            if (remaining[s] > 0) available.push_back(s);
        rng.shuffle(available);

        int customers_after = num_customers - c - 1;
        int want = 1 + static_cast<int>(rng.below(max_customer_degree));
        std::vector<NodeId> picks;
        for (int s : available) {
            if (static_cast<int>(picks.size()) >= want) break;
            // Keep one capacity unit reserved for every later customer.
            if (!picks.empty() && total_remaining - 1 <= customers_after) break;
            picks.push_back(s);
            --remaining[s];
            --total_remaining;
        }
        customers.push_back({id, std::move(picks)});
    }
    return AssignmentInstance::create(std::move(servers), std::move(customers));
}

UndirectedGraph assignment_to_bipartite(const AssignmentInstance& instance) {
    std::vector<NodeId> nodes(instance.servers().begin(), instance.servers().end());
    std::vector<Edge> edges;
    for (const auto& c : instance.customers()) {
        nodes.push_back(c.id);
        for (NodeId s : c.servers) edges.push_back(normalize_edge(c.id, s));
    }
    return UndirectedGraph::create(std::move(nodes), std::move(edges));
}

}  // namespace tokendrop
