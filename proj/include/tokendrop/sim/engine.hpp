#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tokendrop/errors.hpp"
#include "tokendrop/graph.hpp"

namespace tokendrop::sim {

enum class PortDir : std::uint8_t { none, parent, child };

// One endpoint of a bidirectional link. `channel` carries a hyperedge or
// customer id when links are grouped; -1 for plain graph edges.
struct Port {
    NodeId neighbor = 0;
    PortDir dir = PortDir::none;
    std::int64_t channel = -1;
    int peer_port = -1;  // index of this link in the neighbor's port list
    int link = -1;       // global link id
};

// What a node is told at startup, beyond its neighbor list.
struct NodePayload {
    bool has_token = false;
    int level_tag = -1;  // own layer, only for the three-layer program
    int budget = 0;      // shared round budget base for phased programs
    std::vector<std::int64_t> solo_channels;  // single-endpoint channels
};

struct LocalView {
    NodeId id = 0;
    std::span<const Port> ports;
    const NodePayload* payload = nullptr;
};

// Port-labeled network. Nodes are sorted by id; each node's ports are sorted
// by (neighbor id, channel) so port order is deterministic.
class Topology {
public:
    struct Link {
        NodeId a = 0;
        NodeId b = 0;
        PortDir dir_at_a = PortDir::none;  // role of b as seen from a
        PortDir dir_at_b = PortDir::none;
        std::int64_t channel = -1;
    };

    Topology() = default;
    static Topology build(std::vector<NodeId> node_ids, std::vector<Link> links,
                          std::vector<NodePayload> payloads = {});

    int node_count() const { return static_cast<int>(ids_.size()); }
    int link_count() const { return link_count_; }
    NodeId id(int i) const { return ids_[i]; }
    int index_of(NodeId v) const;
    std::span<const Port> ports(int i) const { return ports_[i]; }
    const NodePayload& payload(int i) const { return payloads_[i]; }

private:
    std::vector<NodeId> ids_;
    std::vector<std::vector<Port>> ports_;
    std::vector<NodePayload> payloads_;
    std::unordered_map<NodeId, int> index_;
    int link_count_ = 0;
};

inline Topology Topology::build(std::vector<NodeId> node_ids, std::vector<Link> links,
                                std::vector<NodePayload> payloads) {
    Topology t;
    t.ids_ = std::move(node_ids);
    std::sort(t.ids_.begin(), t.ids_.end());
    if (payloads.empty()) payloads.resize(t.ids_.size());
    if (payloads.size() != t.ids_.size())
        throw Error("payload count does not match node count");
    for (int i = 0; i < static_cast<int>(t.ids_.size()); ++i) {
        if (i > 0 && t.ids_[i] == t.ids_[i - 1])
            throw InvariantViolation("duplicate node id " + std::to_string(t.ids_[i]));
        t.index_.emplace(t.ids_[i], i);
    }
    // Payloads arrive keyed by the caller's (sorted) id order already.
    t.payloads_ = std::move(payloads);
    t.ports_.resize(t.ids_.size());
    t.link_count_ = static_cast<int>(links.size());
    for (int l = 0; l < static_cast<int>(links.size()); ++l) {
        const Link& lk = links[l];
        int ia = t.index_of(lk.a);
        int ib = t.index_of(lk.b);
        if (ia == ib) throw InvariantViolation("self link at node " + std::to_string(lk.a));
        t.ports_[ia].push_back({lk.b, lk.dir_at_a, lk.channel, -1, l});
        t.ports_[ib].push_back({lk.a, lk.dir_at_b, lk.channel, -1, l});
    }
    auto port_less = [](const Port& x, const Port& y) {
        return std::tie(x.neighbor, x.channel, x.link) < std::tie(y.neighbor, y.channel, y.link);
    };
    std::unordered_map<std::int64_t, std::pair<int, int>> where;  // link -> (node, port)
    for (int i = 0; i < static_cast<int>(t.ports_.size()); ++i) {
        std::sort(t.ports_[i].begin(), t.ports_[i].end(), port_less);
        for (int p = 0; p < static_cast<int>(t.ports_[i].size()); ++p) {
            auto [it, fresh] = where.try_emplace(t.ports_[i][p].link, i, p);
            if (!fresh) {
                auto [j, q] = it->second;
                t.ports_[i][p].peer_port = q;
                t.ports_[j][q].peer_port = p;
            }
        }
    }
    return t;
}

inline int Topology::index_of(NodeId v) const {
    auto it = index_.find(v);
    if (it == index_.end()) throw Error("unknown node id " + std::to_string(v));
    return it->second;
}

struct RoundTrace {
    std::int64_t round = 0;
    std::int64_t active = 0;
    std::int64_t messages = 0;
};

struct SimReport {
    std::int64_t rounds = 0;    // synchronous barriers executed; init is round 0
    std::int64_t messages = 0;  // delivered
    std::int64_t messages_sent = 0;
    std::int64_t messages_dropped = 0;  // receiver terminated in the send round
    std::int64_t max_message_bytes = 0;
    std::int64_t terminated = 0;
    std::int64_t phases = 0;       // filled by phased algorithms
    std::int64_t round_pairs = 0;  // request/grant pairs, where applicable
    bool capped = false;
    std::vector<RoundTrace> trace;
};

template <typename Msg>
struct Outbox {
    std::vector<std::pair<int, Msg>> messages;  // (port, message)
    std::vector<int> consume;                   // ports whose link is consumed
    bool terminate = false;

    void send(int port, Msg m) { messages.emplace_back(port, std::move(m)); }
    void consume_port(int port) { consume.push_back(port); }
};

template <typename Msg>
struct StepContext {
    std::int64_t round = 0;
    std::span<const std::pair<int, Msg>> inbox;  // sorted by port
    std::span<const Port> ports;
    const std::vector<char>* port_alive = nullptr;

    bool alive(int port) const { return (*port_alive)[port] != 0; }
};

template <typename State>
struct RunHooks {
    // Checked after every barrier (including the init barrier, round 0).
    std::function<bool(std::int64_t, const std::vector<State>&)> stop_when;
    std::function<void(std::int64_t, const std::vector<State>&)> observer;
};

struct RunOptions {
    std::int64_t round_cap = 1;
    bool trace = false;
    bool reverse_step_order = false;  // exercises evaluation-order independence
};

template <typename P>
struct RunResult {
    std::vector<typename P::State> states;  // by topology node order
    std::vector<char> terminated;
    SimReport report;
};

// Synchronous execution: messages produced in round r are delivered at the
// start of round r+1; consumption and termination masks apply at the round
// barrier. Node programs must be pure, so the result does not depend on the
// order nodes are stepped in.
template <typename P>
RunResult<P> run_sync(const Topology& topo, const P& program, const RunOptions& opt,
                      const RunHooks<typename P::State>& hooks = {}) {
    using Msg = typename P::Message;
    using State = typename P::State;

    const int n = topo.node_count();
    RunResult<P> out;
    out.terminated.assign(n, 0);
    out.states.reserve(n);

    std::vector<std::vector<char>> port_alive(n);
    std::vector<char> link_consumed(topo.link_count(), 0);
    for (int i = 0; i < n; ++i) port_alive[i].assign(topo.ports(i).size(), 1);

    SimReport& rep = out.report;
    std::int64_t live = n;

    struct Delivery {
        int to;
        int port;
        Msg msg;
    };
    std::vector<Delivery> pending;

    auto mask_link = [&](int from, int port) {
        const Port& p = topo.ports(from)[port];
        port_alive[from][port] = 0;
        if (p.peer_port >= 0) port_alive[topo.index_of(p.neighbor)][p.peer_port] = 0;
    };

    // Applies one node's outbox at a barrier; returns messages accepted.
    auto apply_outbox = [&](int i, Outbox<Msg>& box, const std::vector<char>& alive_at_start) {
        for (auto& [port, msg] : box.messages) {
            if (port < 0 || port >= static_cast<int>(alive_at_start.size()) ||
                !alive_at_start[port])
                throw SimBug("node " + std::to_string(topo.id(i)) +
                             " sent on a dead or unknown port");
            const Port& p = topo.ports(i)[port];
            pending.push_back({topo.index_of(p.neighbor), p.peer_port, std::move(msg)});
            ++rep.messages_sent;
            rep.max_message_bytes = std::max<std::int64_t>(rep.max_message_bytes, sizeof(Msg));
        }
        for (int port : box.consume) {
            if (port < 0 || port >= static_cast<int>(alive_at_start.size()))
                throw SimBug("consume of unknown port");
            int link = topo.ports(i)[port].link;
            if (link_consumed[link])
                throw SimBug("node " + std::to_string(topo.id(i)) +
                             " consumed an already-consumed edge");
            link_consumed[link] = 1;
            mask_link(i, port);
        }
        if (box.terminate && !out.terminated[i]) {
            out.terminated[i] = 1;
            --live;
            for (int p = 0; p < static_cast<int>(topo.ports(i).size()); ++p) mask_link(i, p);
        }
    };

    // Round 0: init every node, then apply all outboxes at the barrier.
    {
        std::vector<Outbox<Msg>> boxes(n);
        std::vector<std::vector<char>> masks_at_start = port_alive;
        for (int i = 0; i < n; ++i) {
            LocalView view{topo.id(i), topo.ports(i), &topo.payload(i)};
            out.states.push_back(program.init(view, boxes[i]));
        }
        for (int i = 0; i < n; ++i) apply_outbox(i, boxes[i], masks_at_start[i]);
    }
    if (hooks.observer) hooks.observer(0, out.states);
    bool stop = hooks.stop_when && hooks.stop_when(0, out.states);

    std::vector<std::vector<std::pair<int, Msg>>> inbox(n);
    for (std::int64_t round = 1; !stop && live > 0; ++round) {
        if (round > opt.round_cap) {
            rep.capped = true;
            break;
        }
        // Deliver messages sent in the previous round.
        std::int64_t delivered = 0;
        for (auto& d : pending) {
            if (out.terminated[d.to]) {
                ++rep.messages_dropped;
                continue;
            }
            inbox[d.to].emplace_back(d.port, std::move(d.msg));
            ++delivered;
        }
        pending.clear();
        rep.messages += delivered;

        std::vector<Outbox<Msg>> boxes(n);
        std::vector<std::vector<char>> masks_at_start = port_alive;
        std::int64_t active = 0;
        auto step_one = [&](int i) {
            if (out.terminated[i]) return;
            ++active;
            auto& in = inbox[i];
            std::stable_sort(in.begin(), in.end(),
                             [](const auto& a, const auto& b) { return a.first < b.first; });
            StepContext<Msg> ctx{round, in, topo.ports(i), &masks_at_start[i]};
            program.step(out.states[i], ctx, boxes[i]);
        };
        if (opt.reverse_step_order) {
            for (int i = n - 1; i >= 0; --i) step_one(i);
        } else {
            for (int i = 0; i < n; ++i) step_one(i);
        }
        for (int i = 0; i < n; ++i) {
            inbox[i].clear();
            apply_outbox(i, boxes[i], masks_at_start[i]);
        }
        rep.rounds = round;
        if (opt.trace) rep.trace.push_back({round, active, delivered});
        if (hooks.observer) hooks.observer(round, out.states);
        if (hooks.stop_when && hooks.stop_when(round, out.states)) stop = true;
    }

    rep.messages_dropped += static_cast<std::int64_t>(pending.size());
    rep.terminated = n - live;
    return out;
}

}  // namespace tokendrop::sim
