#include "tokendrop/token_game.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "tokendrop/bounds.hpp"
#include "tokendrop/errors.hpp"

#include "event_log.hpp"

namespace tokendrop {

namespace {

using detail::TokenEvent;
using sim::LocalView;
using sim::Outbox;
using sim::PortDir;
using sim::StepContext;

sim::Topology topology_from_instance(const TokenDropInstance& inst, bool with_level_tags) {
    std::vector<NodeId> ids(inst.nodes().begin(), inst.nodes().end());
    std::vector<sim::Topology::Link> links;
    links.reserve(inst.edges().size());
    for (const auto& [child, parent] : inst.edges())
        links.push_back({child, parent, PortDir::parent, PortDir::child, -1});
    std::vector<sim::NodePayload> payloads(ids.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        payloads[i].has_token = inst.has_token(ids[i]);
        if (with_level_tags) payloads[i].level_tag = inst.level(ids[i]);
    }
    return sim::Topology::build(std::move(ids), std::move(links), std::move(payloads));
}

struct TDMsg {
    enum Kind : std::uint8_t { kStatus, kRequest, kPass };
    Kind kind = kStatus;
    bool occupied = false;
};

// General proposal algorithm. Odd rounds: every unoccupied node that knows of
// an occupied parent requests from the lowest-id one. Even rounds: a
// requested token holder grants its lowest-id requester, consuming that edge,
// and tells its other children it is now empty. Occupancy changes are
// announced to children in the round they happen.
struct ProposalProgram {
    struct State {
        NodeId id = 0;
        bool occupied = false;
        std::int64_t requests = 0;
        std::vector<char> parent_has_token;  // by port
        std::vector<TokenEvent> events;
    };
    using Message = TDMsg;

    State init(const LocalView& view, Outbox<Message>& out) const {
        State s;
        s.id = view.id;
        s.occupied = view.payload->has_token;
        s.parent_has_token.assign(view.ports.size(), 0);
        bool has_parent = false, has_child = false;
        for (int p = 0; p < static_cast<int>(view.ports.size()); ++p) {
            if (view.ports[p].dir == PortDir::parent) has_parent = true;
            if (view.ports[p].dir == PortDir::child) has_child = true;
        }
        if (s.occupied) {
            for (int p = 0; p < static_cast<int>(view.ports.size()); ++p)
                if (view.ports[p].dir == PortDir::child) out.send(p, {TDMsg::kStatus, true});
        }
        if ((s.occupied && !has_child) || (!s.occupied && !has_parent)) out.terminate = true;
        return s;
    }

    void step(State& s, const StepContext<Message>& ctx, Outbox<Message>& out) const {
        bool gained = false;
        int granted_port = -1;
        std::vector<int> requesters;
        for (const auto& [port, msg] : ctx.inbox) {
            switch (msg.kind) {
                case TDMsg::kStatus:
                    s.parent_has_token[port] = msg.occupied;
                    break;
                case TDMsg::kPass:
                    if (s.occupied)
                        throw SimBug("node " + std::to_string(s.id) +
                                     " received a token while occupied");
                    s.occupied = true;
                    gained = true;
                    s.events.push_back({true, ctx.ports[port].neighbor, ctx.round});
                    break;
                case TDMsg::kRequest:
                    requesters.push_back(port);
                    break;
            }
        }
        if (!requesters.empty() && !s.occupied)
            throw SimBug("node " + std::to_string(s.id) + " was requested while unoccupied");

        if (gained) {
            for (int p = 0; p < static_cast<int>(ctx.ports.size()); ++p)
                if (ctx.ports[p].dir == PortDir::child && ctx.alive(p))
                    out.send(p, {TDMsg::kStatus, true});
        }

        if (ctx.round % 2 == 1) {
            if (!s.occupied) {
                for (int p = 0; p < static_cast<int>(ctx.ports.size()); ++p) {
                    if (ctx.ports[p].dir == PortDir::parent && ctx.alive(p) &&
                        s.parent_has_token[p]) {
                        out.send(p, {TDMsg::kRequest, false});
                        ++s.requests;
                        break;  // ports are sorted by neighbor id
                    }
                }
            }
        } else if (s.occupied && !requesters.empty()) {
            granted_port = requesters.front();  // lowest port = lowest neighbor id
            out.send(granted_port, {TDMsg::kPass, false});
            out.consume_port(granted_port);
            s.occupied = false;
            s.events.push_back({false, ctx.ports[granted_port].neighbor, ctx.round});
            for (int p = 0; p < static_cast<int>(ctx.ports.size()); ++p)
                if (p != granted_port && ctx.ports[p].dir == PortDir::child && ctx.alive(p))
                    out.send(p, {TDMsg::kStatus, false});
        }

        bool has_parent = false, has_child = false;
        for (int p = 0; p < static_cast<int>(ctx.ports.size()); ++p) {
            if (!ctx.alive(p) || p == granted_port) continue;
            if (ctx.ports[p].dir == PortDir::parent) has_parent = true;
            if (ctx.ports[p].dir == PortDir::child) has_child = true;
        }
        if ((s.occupied && !has_child) || (!s.occupied && !has_parent)) out.terminate = true;
    }
};

// Three-layer specialization: layer-1 nodes drive. Unoccupied layer-1 nodes
// request from a layer-2 parent, occupied ones propose to a layer-0 child.
// Layer-2 grants one requester and quits; layer-0 takes one offer and quits.
// Aliveness encodes everything: a live layer-2 neighbor always has a token
// and a live layer-0 neighbor is always empty, so no status traffic is
// needed.
struct ThreeLevelProgram {
    struct State {
        NodeId id = 0;
        int layer = 0;
        bool occupied = false;
        bool proposal_out = false;  // layer 1: offer in flight
        std::int64_t requests = 0;
        std::vector<TokenEvent> events;
    };
    struct Message {
        enum Kind : std::uint8_t { kRequest, kPass, kPropose, kAccept };
        Kind kind = kRequest;
    };

    State init(const LocalView& view, Outbox<Message>& out) const {
        State s;
        s.id = view.id;
        s.layer = view.payload->level_tag;
        s.occupied = view.payload->has_token;
        bool has_parent = false, has_child = false;
        for (const auto& port : view.ports) {
            if (port.dir == PortDir::parent) has_parent = true;
            if (port.dir == PortDir::child) has_child = true;
        }
        if (should_quit(s, has_parent, has_child)) out.terminate = true;
        return s;
    }

    bool should_quit(const State& s, bool has_parent, bool has_child) const {
        switch (s.layer) {
            case 0: return s.occupied || !has_parent;
            case 1: return (s.occupied && !has_child) || (!s.occupied && !has_parent);
            default: return !s.occupied || !has_child;  // layer 2
        }
    }

    void step(State& s, const StepContext<Message>& ctx, Outbox<Message>& out) const {
        std::vector<int> requesters, proposers;
        for (const auto& [port, msg] : ctx.inbox) {
            switch (msg.kind) {
                case Message::kRequest: requesters.push_back(port); break;
                case Message::kPropose: proposers.push_back(port); break;
                case Message::kPass:
                    if (s.occupied)
                        throw SimBug("node " + std::to_string(s.id) +
                                     " received a token while occupied");
                    s.occupied = true;
                    s.events.push_back({true, ctx.ports[port].neighbor, ctx.round});
                    break;
                case Message::kAccept:
                    if (!s.occupied)
                        throw SimBug("acceptance reached empty node " + std::to_string(s.id));
                    s.occupied = false;
                    s.proposal_out = false;
                    s.events.push_back({false, ctx.ports[port].neighbor, ctx.round});
                    break;
            }
        }

        int consumed_port = -1;
        if (ctx.round % 2 == 1) {
            if (s.layer == 1) {
                s.proposal_out = false;
                int target = first_alive(ctx, s.occupied ? PortDir::child : PortDir::parent);
                if (target >= 0) {
                    if (s.occupied) {
                        out.send(target, {Message::kPropose});
                        s.proposal_out = true;
                    } else {
                        out.send(target, {Message::kRequest});
                        ++s.requests;
                    }
                }
            }
        } else {
            if (s.layer == 2 && s.occupied && !requesters.empty()) {
                int pick = requesters.front();
                out.send(pick, {Message::kPass});
                out.consume_port(pick);
                consumed_port = pick;
                s.occupied = false;
                s.events.push_back({false, ctx.ports[pick].neighbor, ctx.round});
            } else if (s.layer == 0 && !s.occupied && !proposers.empty()) {
                int pick = proposers.front();
                out.send(pick, {Message::kAccept});
                out.consume_port(pick);
                consumed_port = pick;
                s.occupied = true;
                s.events.push_back({true, ctx.ports[pick].neighbor, ctx.round});
            }
        }

        bool has_parent = false, has_child = false;
        for (int p = 0; p < static_cast<int>(ctx.ports.size()); ++p) {
            if (!ctx.alive(p) || p == consumed_port) continue;
            if (ctx.ports[p].dir == PortDir::parent) has_parent = true;
            if (ctx.ports[p].dir == PortDir::child) has_child = true;
        }
        // A layer-1 node with an offer in flight must stay to hear the verdict.
        if (s.layer == 1 && s.proposal_out) return;
        if (should_quit(s, has_parent, has_child)) out.terminate = true;
    }

    int first_alive(const StepContext<Message>& ctx, PortDir dir) const {
        for (int p = 0; p < static_cast<int>(ctx.ports.size()); ++p)
            if (ctx.ports[p].dir == dir && ctx.alive(p)) return p;
        return -1;
    }
};

template <typename State>
NodeCenteredOutput collect_node_centered(const TokenDropInstance& inst,
                                         const std::vector<State>& states) {
    std::vector<detail::NodeEvents> all;
    all.reserve(states.size());
    for (const State& s : states) all.push_back({s.id, inst.has_token(s.id), &s.events});
    return detail::build_node_centered(all);
}

template <typename Program>
GameRun run_game(const TokenDropInstance& inst, bool level_tags, std::int64_t cap,
                 std::vector<ProposalTraceRow>* trace) {
    sim::Topology topo = topology_from_instance(inst, level_tags);
    Program program;
    sim::RunOptions opt;
    opt.round_cap = cap + 2;
    sim::RunHooks<typename Program::State> hooks;
    if (trace) {
        hooks.observer = [&](std::int64_t round, const std::vector<typename Program::State>& st) {
            ProposalTraceRow row;
            row.round = round;
            row.occupied.resize(st.size());
            for (std::size_t i = 0; i < st.size(); ++i) row.occupied[i] = st[i].occupied;
            trace->push_back(std::move(row));
        };
    }
    auto result = sim::run_sync(topo, program, opt, hooks);
    if (result.report.capped)
        throw Error("token game exceeded its round cap of " + std::to_string(cap) +
                    "; the bound argument rules this out");

    GameRun run;
    run.report = result.report;
    run.report.round_pairs = (result.report.rounds + 1) / 2;
    run.requests_per_node.reserve(result.states.size());
    for (const auto& s : result.states) run.requests_per_node.push_back(s.requests);
    run.solution.node_centered = collect_node_centered(inst, result.states);
    run.solution.traversals = derive_traversals(run.solution.node_centered, inst);
    return run;
}

}  // namespace

NodeCenteredOutput project_node_centered(const std::vector<Traversal>& traversals) {
    NodeCenteredOutput form;
    for (const Traversal& t : traversals) {
        if (t.size() < 2) continue;
        form[t.front()].origin_out = t[1];
        for (std::size_t i = 1; i + 1 < t.size(); ++i)
            form[t[i]].through.emplace_back(t[i - 1], t[i + 1]);
        form[t.back()].destination_in = t[t.size() - 2];
    }
    return form;
}

std::vector<Traversal> derive_traversals(const NodeCenteredOutput& form,
                                         const TokenDropInstance& instance) {
    // Per node: unconsumed continuation map and destination marker.
    struct Routing {
        std::unordered_map<NodeId, NodeId> next;  // arrived-from -> forwarded-to
        std::optional<NodeId> destination_in;
        std::optional<NodeId> origin_out;
    };
    std::unordered_map<NodeId, Routing> routing;
    std::size_t pairs = 0;
    for (const auto& [node, entry] : form) {
        Routing r;
        for (const auto& [from, to] : entry.through) {
            if (!r.next.emplace(from, to).second)
                throw InvariantViolation("node " + std::to_string(node) +
                                         " pairs incoming edge from " + std::to_string(from) +
                                         " twice");
            ++pairs;
        }
        r.destination_in = entry.destination_in;
        r.origin_out = entry.origin_out;
        if (entry.origin_out && !instance.has_token(node))
            throw InvariantViolation("node " + std::to_string(node) +
                                     " reports an outgoing token but held none");
        routing.emplace(node, std::move(r));
    }

    std::vector<Traversal> out;
    std::size_t consumed_pairs = 0, consumed_destinations = 0;
    for (NodeId origin : instance.tokens()) {
        Traversal t{origin};
        auto it = routing.find(origin);
        if (it == routing.end() || !it->second.origin_out) {
            out.push_back(std::move(t));
            continue;
        }
        NodeId from = origin;
        NodeId at = *it->second.origin_out;
        const std::size_t limit = instance.edges().size() + 1;
        while (true) {
            t.push_back(at);
            if (t.size() > limit)
                throw InvariantViolation("token from node " + std::to_string(origin) +
                                         " never reaches a destination");
            auto rit = routing.find(at);
            if (rit == routing.end())
                throw InvariantViolation("token from node " + std::to_string(origin) +
                                         " enters node " + std::to_string(at) +
                                         " which reports nothing");
            Routing& r = rit->second;
            if (r.destination_in && *r.destination_in == from) {
                ++consumed_destinations;
                break;
            }
            auto nit = r.next.find(from);
            if (nit == r.next.end())
                throw InvariantViolation("dangling traversal: node " + std::to_string(at) +
                                         " has no continuation for the token arriving from " +
                                         std::to_string(from));
            from = at;
            at = nit->second;
            r.next.erase(nit);
            ++consumed_pairs;
        }
    }
    if (consumed_pairs != pairs)
        throw InvariantViolation("node-centered output contains pairs no token explains");
    std::size_t destinations = 0;
    for (const auto& [node, r] : routing) destinations += r.destination_in.has_value();
    if (consumed_destinations != destinations)
        throw InvariantViolation("node-centered output contains unreachable destinations");
    return out;
}

TraversalValidation validate_traversals(const TokenDropInstance& instance,
                                        const TraversalSet& out) {
    auto reject = [](std::string rule, std::string witness, std::string message) {
        return TraversalValidation{false, std::move(rule), std::move(witness), std::move(message)};
    };
    auto edge_name = [](NodeId c, NodeId p) {
        return "(" + std::to_string(c) + ", " + std::to_string(p) + ")";
    };

    std::set<Edge> instance_edges(instance.edges().begin(), instance.edges().end());

    // One traversal per token, starting at it.
    std::vector<NodeId> origins;
    for (const Traversal& t : out.traversals) {
        if (t.empty()) return reject("path", "", "empty traversal");
        origins.push_back(t.front());
    }
    std::sort(origins.begin(), origins.end());
    if (!std::equal(origins.begin(), origins.end(), instance.tokens().begin(),
                    instance.tokens().end()))
        return reject("path", "", "traversal origins do not match the token set");

    std::set<Edge> used;  // (child, parent) = downward hops
    for (const Traversal& t : out.traversals) {
        for (std::size_t i = 1; i < t.size(); ++i) {
            Edge e{t[i], t[i - 1]};  // moved from parent t[i-1] down to child t[i]
            if (!instance_edges.count(e))
                return reject("path", edge_name(e.first, e.second),
                              "traversal hop over a non-edge " + edge_name(e.first, e.second));
            if (!used.insert(e).second)
                return reject("edge-disjoint", edge_name(e.first, e.second),
                              "edge " + edge_name(e.first, e.second) +
                                  " is used by two traversals");
        }
    }

    std::set<NodeId> destinations;
    for (const Traversal& t : out.traversals) {
        if (!destinations.insert(t.back()).second)
            return reject("unique-destination", std::to_string(t.back()),
                          "node " + std::to_string(t.back()) +
                              " is the destination of two traversals");
    }

    for (NodeId dest : destinations) {
        for (NodeId child : instance.children(dest)) {
            if (used.count({child, dest})) continue;       // consumed
            if (destinations.count(child)) continue;        // occupied child
            return reject("maximal", std::to_string(dest),
                          "token resting at " + std::to_string(dest) +
                              " could still drop to " + std::to_string(child) + " over edge " +
                              edge_name(child, dest));
        }
    }
    return {};
}

GameRun run_proposal(const TokenDropInstance& instance) {
    return run_game<ProposalProgram>(
        instance, false, proposal_round_bound(instance.height(), instance.max_degree()), nullptr);
}

GameRun run_proposal_traced(const TokenDropInstance& instance,
                            std::vector<ProposalTraceRow>* trace) {
    return run_game<ProposalProgram>(
        instance, false, proposal_round_bound(instance.height(), instance.max_degree()), trace);
}

GameRun run_three_level(const TokenDropInstance& instance) {
    int max_level = 0;
    for (NodeId v : instance.nodes()) max_level = std::max(max_level, instance.level(v));
    if (max_level > 2)
        throw InvariantViolation("level out of range: the three-layer algorithm handles layers "
                                 "{0, 1, 2}, instance has a node at level " +
                                 std::to_string(max_level));
    return run_game<ThreeLevelProgram>(instance, true,
                                       three_level_round_bound(instance.max_degree()), nullptr);
}

std::vector<Edge> matching_via_token_drop(const UndirectedGraph& bipartite,
                                          const std::vector<NodeId>& left_side) {
    std::unordered_set<NodeId> left(left_side.begin(), left_side.end());
    for (NodeId v : left_side)
        if (!bipartite.has_node(v))
            throw InvariantViolation("left side lists unknown node " + std::to_string(v));
    std::vector<std::pair<NodeId, int>> levels;
    std::vector<NodeId> tokens;
    for (NodeId v : bipartite.nodes()) {
        bool is_left = left.count(v) > 0;
        levels.emplace_back(v, is_left ? 1 : 0);
        if (is_left) tokens.push_back(v);
    }
    std::vector<Edge> directed;
    for (const auto& [a, b] : bipartite.edges()) {
        bool la = left.count(a) > 0, lb = left.count(b) > 0;
        if (la == lb)
            throw InvariantViolation("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                                     ") does not cross the bipartition");
        directed.emplace_back(la ? b : a, la ? a : b);  // (child in V, parent in U)
    }
    TokenDropInstance game = TokenDropInstance::create(
        std::vector<NodeId>(bipartite.nodes().begin(), bipartite.nodes().end()),
        std::move(directed), std::move(levels), std::move(tokens));

    GameRun run = run_three_level(game);
    std::vector<Edge> matching;
    for (const Traversal& t : run.solution.traversals)
        if (t.size() == 2) matching.push_back(normalize_edge(t[0], t[1]));
    std::sort(matching.begin(), matching.end());
    return matching;
}

}  // namespace tokendrop
