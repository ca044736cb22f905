#include "tokendrop/instances.hpp"

#include <algorithm>

#include "tokendrop/errors.hpp"

namespace tokendrop {

TokenDropInstance TokenDropInstance::create(std::vector<NodeId> nodes,
                                            std::vector<Edge> child_parent_edges,
                                            std::vector<std::pair<NodeId, int>> levels,
                                            std::vector<NodeId> tokens,
                                            std::optional<int> declared_height) {
    TokenDropInstance inst;
    std::sort(nodes.begin(), nodes.end());
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        if (nodes[i] == nodes[i - 1])
            throw InvariantViolation("duplicate node id " + std::to_string(nodes[i]));
    }
    inst.nodes_ = std::move(nodes);
    for (int i = 0; i < static_cast<int>(inst.nodes_.size()); ++i)
        inst.index_.emplace(inst.nodes_[i], i);

    inst.levels_.assign(inst.nodes_.size(), -1);
    for (const auto& [id, lvl] : levels) {
        auto it = inst.index_.find(id);
        if (it == inst.index_.end())
            throw InvariantViolation("level for unknown node " + std::to_string(id));
        if (inst.levels_[it->second] != -1)
            throw InvariantViolation("duplicate level for node " + std::to_string(id));
        if (lvl < 0) throw InvariantViolation("negative level at node " + std::to_string(id));
        inst.levels_[it->second] = lvl;
    }
    int max_level = 0;
    for (std::size_t i = 0; i < inst.levels_.size(); ++i) {
        if (inst.levels_[i] == -1)
            throw InvariantViolation("missing level for node " + std::to_string(inst.nodes_[i]));
        max_level = std::max(max_level, inst.levels_[i]);
    }
    inst.height_ = declared_height.value_or(std::max(1, max_level));
    if (max_level > inst.height_)
        throw InvariantViolation("level " + std::to_string(max_level) +
                                 " exceeds declared height " + std::to_string(inst.height_));

    std::sort(child_parent_edges.begin(), child_parent_edges.end());
    for (std::size_t i = 0; i < child_parent_edges.size(); ++i) {
        const auto& [child, parent] = child_parent_edges[i];
        if (i > 0 && child_parent_edges[i] == child_parent_edges[i - 1])
            throw InvariantViolation("duplicate edge (" + std::to_string(child) + ", " +
                                     std::to_string(parent) + ")");
        if (!inst.index_.count(child) || !inst.index_.count(parent))
            throw InvariantViolation("edge (" + std::to_string(child) + ", " +
                                     std::to_string(parent) + ") references an unknown node");
        if (child == parent)
            throw InvariantViolation("self-loop at node " + std::to_string(child));
        int lc = inst.levels_[inst.index_.at(child)];
        int lp = inst.levels_[inst.index_.at(parent)];
        if (lp != lc + 1)
            throw InvariantViolation("edge (" + std::to_string(child) + ", " +
                                     std::to_string(parent) + "): level(" +
                                     std::to_string(parent) + ") = " + std::to_string(lp) +
                                     " is not level(" + std::to_string(child) + ") + 1 = " +
                                     std::to_string(lc + 1));
    }
    inst.edges_ = std::move(child_parent_edges);

    std::sort(tokens.begin(), tokens.end());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i > 0 && tokens[i] == tokens[i - 1])
            throw InvariantViolation("node " + std::to_string(tokens[i]) +
                                     " holds more than one token");
        if (!inst.index_.count(tokens[i]))
            throw InvariantViolation("token on unknown node " + std::to_string(tokens[i]));
    }
    inst.tokens_ = std::move(tokens);

    inst.parents_.resize(inst.nodes_.size());
    inst.children_.resize(inst.nodes_.size());
    for (const auto& [child, parent] : inst.edges_) {
        inst.parents_[inst.index_.at(child)].push_back(parent);
        inst.children_[inst.index_.at(parent)].push_back(child);
    }
    for (std::size_t i = 0; i < inst.nodes_.size(); ++i) {
        std::sort(inst.parents_[i].begin(), inst.parents_[i].end());
        std::sort(inst.children_[i].begin(), inst.children_[i].end());
        inst.max_degree_ = std::max(
            inst.max_degree_, static_cast<int>(inst.parents_[i].size() + inst.children_[i].size()));
    }
    return inst;
}

bool TokenDropInstance::has_token(NodeId v) const {
    return std::binary_search(tokens_.begin(), tokens_.end(), v);
}

int TokenDropInstance::index_of(NodeId v) const {
    auto it = index_.find(v);
    if (it == index_.end())
        throw InvariantViolation("unknown node id " + std::to_string(v));
    return it->second;
}

AssignmentInstance AssignmentInstance::create(std::vector<NodeId> servers,
                                              std::vector<Customer> customers) {
    AssignmentInstance inst;
    std::sort(servers.begin(), servers.end());
    for (std::size_t i = 1; i < servers.size(); ++i) {
        if (servers[i] == servers[i - 1])
            throw InvariantViolation("duplicate server id " + std::to_string(servers[i]));
    }
    inst.servers_ = std::move(servers);
    for (int i = 0; i < static_cast<int>(inst.servers_.size()); ++i)
        inst.server_index_.emplace(inst.servers_[i], i);

    std::sort(customers.begin(), customers.end(),
              [](const Customer& a, const Customer& b) { return a.id < b.id; });
    inst.server_degrees_.assign(inst.servers_.size(), 0);
    for (std::size_t c = 0; c < customers.size(); ++c) {
        Customer& cust = customers[c];
        if (c > 0 && cust.id == customers[c - 1].id)
            throw InvariantViolation("duplicate customer id " + std::to_string(cust.id));
        if (inst.server_index_.count(cust.id))
            throw InvariantViolation("id " + std::to_string(cust.id) +
                                     " used for both a server and a customer");
        if (cust.servers.empty())
            throw InvariantViolation("customer " + std::to_string(cust.id) +
                                     " has no adjacent server");
        std::sort(cust.servers.begin(), cust.servers.end());
        for (std::size_t i = 0; i < cust.servers.size(); ++i) {
            if (i > 0 && cust.servers[i] == cust.servers[i - 1])
                throw InvariantViolation("customer " + std::to_string(cust.id) +
                                         " lists server " + std::to_string(cust.servers[i]) +
                                         " twice");
            auto it = inst.server_index_.find(cust.servers[i]);
            if (it == inst.server_index_.end())
                throw InvariantViolation("customer " + std::to_string(cust.id) +
                                         " references unknown server " +
                                         std::to_string(cust.servers[i]));
            ++inst.server_degrees_[it->second];
        }
        inst.max_customer_degree_ =
            std::max(inst.max_customer_degree_, static_cast<int>(cust.servers.size()));
        inst.customer_index_.emplace(cust.id, static_cast<int>(c));
    }
    inst.customers_ = std::move(customers);
    for (int d : inst.server_degrees_) inst.max_server_degree_ = std::max(inst.max_server_degree_, d);
    return inst;
}

int AssignmentInstance::customer_index(NodeId id) const {
    auto it = customer_index_.find(id);
    if (it == customer_index_.end())
        throw InvariantViolation("unknown customer id " + std::to_string(id));
    return it->second;
}

int AssignmentInstance::server_index(NodeId id) const {
    auto it = server_index_.find(id);
    if (it == server_index_.end())
        throw InvariantViolation("unknown server id " + std::to_string(id));
    return it->second;
}

}  // namespace tokendrop
