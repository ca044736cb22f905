#include "tokendrop/orientation.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "tokendrop/bounds.hpp"
#include "tokendrop/errors.hpp"

#include "event_log.hpp"

namespace tokendrop {

OrientationState::OrientationState(std::shared_ptr<const UndirectedGraph> base)
    : base_(std::move(base)),
      status_(base_->edge_count(), 0),
      loads_(base_->node_count(), 0) {}

OrientationState::OrientationState(const UndirectedGraph& base)
    : OrientationState(std::make_shared<UndirectedGraph>(base)) {}

int OrientationState::edge_index(NodeId a, NodeId b) const {
    Edge e = normalize_edge(a, b);
    auto edges = base_->edges();
    auto it = std::lower_bound(edges.begin(), edges.end(), e);
    if (it == edges.end() || *it != e)
        throw InvariantViolation("no edge (" + std::to_string(a) + ", " + std::to_string(b) + ")");
    return static_cast<int>(it - edges.begin());
}

bool OrientationState::is_oriented(NodeId a, NodeId b) const {
    return status_[edge_index(a, b)] != 0;
}

std::optional<NodeId> OrientationState::head(NodeId a, NodeId b) const {
    int i = edge_index(a, b);
    if (status_[i] == 0) return std::nullopt;
    const Edge& e = base_->edges()[i];
    return status_[i] == 1 ? e.first : e.second;
}

void OrientationState::orient(NodeId tail, NodeId head) {
    int i = edge_index(tail, head);
    if (status_[i] != 0)
        throw InvariantViolation("edge (" + std::to_string(tail) + ", " + std::to_string(head) +
                                 ") is already oriented");
    const Edge& e = base_->edges()[i];
    status_[i] = head == e.first ? 1 : 2;
    ++loads_[base_->index_of(head)];
    ++oriented_count_;
}

void OrientationState::flip(NodeId a, NodeId b) {
    int i = edge_index(a, b);
    if (status_[i] == 0)
        throw InvariantViolation("cannot flip unoriented edge (" + std::to_string(a) + ", " +
                                 std::to_string(b) + ")");
    const Edge& e = base_->edges()[i];
    NodeId old_head = status_[i] == 1 ? e.first : e.second;
    NodeId new_head = status_[i] == 1 ? e.second : e.first;
    status_[i] = status_[i] == 1 ? 2 : 1;
    --loads_[base_->index_of(old_head)];
    ++loads_[base_->index_of(new_head)];
}

std::vector<std::optional<NodeId>> OrientationState::heads() const {
    std::vector<std::optional<NodeId>> out(status_.size());
    for (std::size_t i = 0; i < status_.size(); ++i) {
        if (status_[i] == 1) out[i] = base_->edges()[i].first;
        else if (status_[i] == 2) out[i] = base_->edges()[i].second;
    }
    return out;
}

bool OrientationState::operator==(const OrientationState& other) const {
    return *base_ == *other.base_ && status_ == other.status_;
}

bool is_happy(const OrientationState& o, NodeId tail, NodeId head) {
    return badness(o, tail, head) <= 1;
}

int badness(const OrientationState& o, NodeId tail, NodeId head) {
    auto h = o.head(tail, head);
    if (!h)
        throw InvariantViolation("edge (" + std::to_string(tail) + ", " + std::to_string(head) +
                                 ") is unoriented");
    if (*h != head)
        throw InvariantViolation("edge (" + std::to_string(tail) + ", " + std::to_string(head) +
                                 ") is oriented toward " + std::to_string(tail));
    return o.load(head) - o.load(tail);
}

StabilityReport check_stable(const OrientationState& o) {
    for (const auto& [a, b] : o.graph().edges()) {
        auto h = o.head(a, b);
        if (!h) {
            return {false, "(" + std::to_string(a) + ", " + std::to_string(b) + ")",
                    "edge (" + std::to_string(a) + ", " + std::to_string(b) + ") is unoriented"};
        }
        NodeId tail = *h == a ? b : a;
        if (o.load(*h) > o.load(tail) + 1) {
            return {false, "(" + std::to_string(tail) + ", " + std::to_string(*h) + ")",
                    "edge (" + std::to_string(tail) + ", " + std::to_string(*h) +
                        ") is unhappy: indegree " + std::to_string(o.load(*h)) + " > " +
                        std::to_string(o.load(tail)) + " + 1"};
        }
    }
    return {};
}

bool is_stable(const OrientationState& o) {
    if (!o.fully_oriented()) {
        StabilityReport r = check_stable(o);
        throw InvariantViolation("incomplete orientation: " + r.message);
    }
    return check_stable(o).ok;
}

std::vector<std::pair<NodeId, NodeId>> propose_orientations(const OrientationState& o,
                                                            int* proposals_made) {
    // Each unoriented edge proposes to its endpoint with the smaller load,
    // ids breaking ties; a proposed node accepts its lowest-id proposer.
    std::map<NodeId, NodeId> best;  // accepter -> proposer
    int made = 0;
    for (const auto& [a, b] : o.graph().edges()) {
        if (o.is_oriented(a, b)) continue;
        ++made;
        NodeId target = std::pair(o.load(a), a) <= std::pair(o.load(b), b) ? a : b;
        NodeId other = target == a ? b : a;
        auto [it, fresh] = best.try_emplace(target, other);
        if (!fresh && other < it->second) it->second = other;
    }
    if (proposals_made) *proposals_made = made;
    return {best.begin(), best.end()};
}

TokenDropInstance build_token_instance(const OrientationState& o,
                                       const std::vector<std::pair<NodeId, NodeId>>& accepted) {
    const UndirectedGraph& g = o.graph();
    std::vector<NodeId> nodes(g.nodes().begin(), g.nodes().end());
    std::vector<std::pair<NodeId, int>> levels;
    levels.reserve(nodes.size());
    for (NodeId v : nodes) levels.emplace_back(v, o.load(v));
    std::vector<Edge> game_edges;
    for (const auto& [a, b] : g.edges()) {
        auto h = o.head(a, b);
        if (!h) continue;
        NodeId tail = *h == a ? b : a;
        if (o.load(*h) - o.load(tail) == 1) game_edges.emplace_back(tail, *h);
    }
    std::vector<NodeId> tokens;
    tokens.reserve(accepted.size());
    for (const auto& [accepter, proposer] : accepted) tokens.push_back(accepter);
    return TokenDropInstance::create(std::move(nodes), std::move(game_edges), std::move(levels),
                                     std::move(tokens));
}

void apply_flips(OrientationState& o, const std::vector<Traversal>& traversals) {
    for (const Traversal& t : traversals) {
        for (std::size_t i = 1; i < t.size(); ++i) {
            auto h = o.head(t[i - 1], t[i]);
            if (!h || *h != t[i - 1])
                throw InvariantViolation("traversal hop (" + std::to_string(t[i - 1]) + " -> " +
                                         std::to_string(t[i]) +
                                         ") does not follow an edge oriented toward " +
                                         std::to_string(t[i - 1]));
            o.flip(t[i - 1], t[i]);
        }
    }
}

void commit_orientations(OrientationState& o,
                         const std::vector<std::pair<NodeId, NodeId>>& accepted) {
    for (const auto& [accepter, proposer] : accepted) o.orient(proposer, accepter);
}

namespace {

using detail::TokenEvent;
using sim::LocalView;
using sim::Outbox;
using sim::PortDir;
using sim::StepContext;

struct OrMsg {
    enum Kind : std::uint8_t { kLoad, kAccept, kStatus, kRequest, kPass };
    Kind kind = kLoad;
    std::int32_t load = 0;
    bool occupied = false;
};

enum class Orient : std::uint8_t { unoriented, toward_me, toward_them };

// One phase, fixed length per the shared schedule:
//   rip 0           broadcast committed load (phase 1's rip 0 is init)
//   rip 1           decide proposals/acceptance from exchanged loads, send
//                   the acceptance, announce the fresh token to game children
//   rip 2..1+G      embedded game, even rip = request, odd rip = grant
//   rip 2+G         drain the final grants, commit, advance to next phase
// Token moves flip the edge on both endpoints as the grant travels, accepted
// edges orient toward the accepter at commit.
struct OrientProgram {
    using Message = OrMsg;

    struct EdgeSlot {
        Orient orient = Orient::unoriented;
        std::int32_t their_load = 0;
        bool pending_me = false;
        bool pending_them = false;
        bool game_parent = false;  // neighbor is my parent this phase
        bool game_child = false;
        bool game_consumed = false;
        bool parent_has_token = false;
    };

    struct PhaseLog {
        int accepted_port = -1;
        std::vector<TokenEvent> events;
    };

    struct State {
        NodeId id = 0;
        int delta = 0;
        std::int64_t phase = 1;
        std::int64_t rip = 0;  // round in phase of the next step
        std::int32_t my_load = 0;
        bool have_token = false;
        std::vector<EdgeSlot> edges;
        std::vector<PhaseLog> logs;
    };

    std::int64_t phase_len(const State& s) const {
        return orientation_phase_length(s.phase, s.delta);
    }

    State init(const LocalView& view, Outbox<Message>& out) const {
        State s;
        s.id = view.id;
        s.delta = view.payload->budget;
        s.edges.resize(view.ports.size());
        if (view.ports.empty()) {
            out.terminate = true;
            return s;
        }
        s.logs.emplace_back();
        for (int p = 0; p < static_cast<int>(view.ports.size()); ++p)
            out.send(p, {OrMsg::kLoad, 0, false});
        s.rip = 1;
        return s;
    }

    void step(State& s, const StepContext<Message>& ctx, Outbox<Message>& out) const {
        const std::int64_t len = phase_len(s);
        const std::int64_t window = len - 3;  // game rounds this phase

        if (s.rip == 0) {
            start_phase(s, ctx, out);
        } else if (s.rip == 1) {
            decide_phase(s, ctx, out);
        } else if (s.rip < 2 + window) {
            game_round(s, ctx, out, /*request=*/s.rip % 2 == 0);
        } else {
            drain_and_commit(s, ctx);
        }

        ++s.rip;
        if (s.rip >= len) {
            s.rip = 0;
            ++s.phase;
        }
    }

    void start_phase(State& s, const StepContext<Message>& ctx, Outbox<Message>& out) const {
        s.logs.emplace_back();
        for (auto& e : s.edges) {
            e.game_parent = e.game_child = e.game_consumed = false;
            e.parent_has_token = false;
        }
        if (!ctx.inbox.empty()) throw SimBug("unexpected traffic at a phase start");
        for (int p = 0; p < static_cast<int>(ctx.ports.size()); ++p)
            out.send(p, {OrMsg::kLoad, s.my_load, false});
    }

    void decide_phase(State& s, const StepContext<Message>& ctx, Outbox<Message>& out) const {
        for (const auto& [port, msg] : ctx.inbox) {
            if (msg.kind != OrMsg::kLoad) throw SimBug("expected only load reports");
            s.edges[port].their_load = msg.load;
        }
        // Proposals: every unoriented edge targets the (load, id)-smaller
        // endpoint; I accept the lowest-id proposer, if any target me.
        int accept_port = -1;
        for (int p = 0; p < static_cast<int>(ctx.ports.size()); ++p) {
            EdgeSlot& e = s.edges[p];
            if (e.orient != Orient::unoriented) continue;
            auto mine = std::pair(s.my_load, s.id);
            auto theirs = std::pair(e.their_load, ctx.ports[p].neighbor);
            if (mine <= theirs && accept_port < 0) accept_port = p;  // ports sorted by id
        }
        if (accept_port >= 0) {
            s.edges[accept_port].pending_me = true;
            s.have_token = true;
            s.logs.back().accepted_port = accept_port;
            out.send(accept_port, {OrMsg::kAccept, 0, false});
        }
        // Game structure: oriented edges whose head exceeds the tail by one.
        for (int p = 0; p < static_cast<int>(ctx.ports.size()); ++p) {
            EdgeSlot& e = s.edges[p];
            if (e.orient == Orient::toward_me && s.my_load == e.their_load + 1)
                e.game_child = true;
            if (e.orient == Orient::toward_them && e.their_load == s.my_load + 1)
                e.game_parent = true;
        }
        if (s.have_token) announce(s, ctx, out, true, -1);
    }

    void game_round(State& s, const StepContext<Message>& ctx, Outbox<Message>& out,
                    bool request) const {
        std::vector<int> requesters;
        process_game_inbox(s, ctx, out, &requesters);
        if (request) {
            if (!s.have_token) {
                for (int p = 0; p < static_cast<int>(ctx.ports.size()); ++p) {
                    const EdgeSlot& e = s.edges[p];
                    if (e.game_parent && !e.game_consumed && e.parent_has_token) {
                        out.send(p, {OrMsg::kRequest, 0, false});
                        break;
                    }
                }
            }
        } else if (s.have_token && !requesters.empty()) {
            int pick = requesters.front();
            EdgeSlot& e = s.edges[pick];
            if (!e.game_child || e.game_consumed)
                throw SimBug("grant over a non-game edge at node " + std::to_string(s.id));
            out.send(pick, {OrMsg::kPass, 0, false});
            e.game_consumed = true;
            e.orient = Orient::toward_them;  // the token drop flips the edge
            s.have_token = false;
            s.logs.back().events.push_back({false, ctx.ports[pick].neighbor, ctx.round});
            announce(s, ctx, out, false, pick);
        }
    }

    void drain_and_commit(State& s, const StepContext<Message>& ctx) const {
        process_game_inbox(s, ctx, nullptr, nullptr);
        for (auto& e : s.edges) {
            if (e.pending_me) {
                if (e.orient != Orient::unoriented) throw SimBug("commit over an oriented edge");
                e.orient = Orient::toward_me;
            } else if (e.pending_them) {
                if (e.orient != Orient::unoriented) throw SimBug("commit over an oriented edge");
                e.orient = Orient::toward_them;
            }
            e.pending_me = e.pending_them = false;
        }
        s.my_load = 0;
        for (const auto& e : s.edges) s.my_load += e.orient == Orient::toward_me;
        s.have_token = false;
    }

    void process_game_inbox(State& s, const StepContext<Message>& ctx, Outbox<Message>* out,
                            std::vector<int>* requesters) const {
        bool gained = false;
        for (const auto& [port, msg] : ctx.inbox) {
            EdgeSlot& e = s.edges[port];
            switch (msg.kind) {
                case OrMsg::kAccept:
                    e.pending_them = true;
                    break;
                case OrMsg::kStatus:
                    e.parent_has_token = msg.occupied;
                    break;
                case OrMsg::kPass:
                    if (s.have_token)
                        throw SimBug("node " + std::to_string(s.id) +
                                     " received a token while occupied");
                    if (!e.game_parent || e.game_consumed)
                        throw SimBug("token arrived over a non-game edge");
                    s.have_token = true;
                    gained = true;
                    e.game_consumed = true;
                    e.orient = Orient::toward_me;
                    s.logs.back().events.push_back({true, ctx.ports[port].neighbor, ctx.round});
                    break;
                case OrMsg::kRequest:
                    if (requesters == nullptr)
                        throw SimBug("request arrived outside the game window");
                    requesters->push_back(port);
                    break;
                case OrMsg::kLoad:
                    throw SimBug("late load report");
            }
        }
        if (requesters && !requesters->empty() && !s.have_token)
            throw SimBug("node " + std::to_string(s.id) + " was requested while empty");
        if (gained && out) announce(s, ctx, *out, true, -1);
    }

    void announce(const State& s, const StepContext<Message>& ctx, Outbox<Message>& out,
                  bool occupied, int skip_port) const {
        for (int p = 0; p < static_cast<int>(ctx.ports.size()); ++p) {
            const EdgeSlot& e = s.edges[p];
            if (p != skip_port && e.game_child && !e.game_consumed)
                out.send(p, {OrMsg::kStatus, 0, occupied});
        }
    }
};

}  // namespace

OrientationRun run_stable_orientation(const UndirectedGraph& g) {
    auto base = std::make_shared<UndirectedGraph>(g);
    OrientationRun run;
    run.orientation = OrientationState(base);
    if (g.node_count() == 0) return run;

    const int delta = g.max_degree();
    std::vector<NodeId> ids(g.nodes().begin(), g.nodes().end());
    std::vector<sim::Topology::Link> links;
    links.reserve(g.edges().size());
    for (const auto& [a, b] : g.edges())
        links.push_back({a, b, PortDir::none, PortDir::none, -1});
    std::vector<sim::NodePayload> payloads(ids.size());
    for (auto& p : payloads) p.budget = delta;
    sim::Topology topo = sim::Topology::build(ids, std::move(links), std::move(payloads));

    const std::int64_t max_phases = orientation_phase_bound(delta);
    std::int64_t cap = 0;
    for (std::int64_t p = 1; p <= max_phases; ++p) cap += orientation_phase_length(p, delta);

    OrientProgram program;
    sim::RunOptions opt;
    opt.round_cap = cap + 2;
    opt.trace = true;
    sim::RunHooks<OrientProgram::State> hooks;
    hooks.stop_when = [&](std::int64_t round, const std::vector<OrientProgram::State>& st) {
        if (round == 0) return false;
        for (const auto& s : st) {
            if (s.edges.empty()) continue;
            if (s.rip != 0) return false;
            for (const auto& e : s.edges)
                if (e.orient == Orient::unoriented) return false;
        }
        return true;
    };

    auto result = sim::run_sync(topo, program, opt, hooks);
    if (result.report.capped)
        throw InvariantViolation("stable orientation exceeded " + std::to_string(max_phases) +
                                 " phases; the phase bound rules this out");
    run.report = result.report;

    // Replay each phase with the pure steps and cross-check the node logs:
    // identical proposals, a valid embedded game, and matching load changes.
    std::int64_t phases = 0;
    for (const auto& s : result.states)
        phases = std::max<std::int64_t>(phases, static_cast<std::int64_t>(s.logs.size()));
    run.report.phases = phases;

    OrientationState& replay = run.orientation;
    std::int64_t phase_start_round = 0;
    for (std::int64_t p = 1; p <= phases; ++p) {
        PhaseRecord rec;
        rec.phase = static_cast<int>(p);

        std::vector<std::pair<NodeId, NodeId>> accepted =
            propose_orientations(replay, &rec.proposals_made);
        // The nodes' own accept decisions must agree with the pure rule.
        std::vector<std::pair<NodeId, NodeId>> from_logs;
        for (std::size_t i = 0; i < result.states.size(); ++i) {
            const auto& s = result.states[i];
            if (p - 1 >= static_cast<std::int64_t>(s.logs.size())) continue;
            int port = s.logs[p - 1].accepted_port;
            if (port >= 0) from_logs.emplace_back(s.id, topo.ports(static_cast<int>(i))[port].neighbor);
        }
        std::sort(from_logs.begin(), from_logs.end());
        if (from_logs != accepted)
            throw InvariantViolation("phase " + std::to_string(p) +
                                     ": distributed acceptances diverge from the proposal rule");
        rec.proposals_accepted = static_cast<int>(accepted.size());
        rec.edges_newly_oriented = static_cast<int>(accepted.size());

        TokenDropInstance game = build_token_instance(replay, accepted);
        if (p > 1 && game.height() > std::min<std::int64_t>(p - 1, delta))
            throw InvariantViolation("phase " + std::to_string(p) + ": game height " +
                                     std::to_string(game.height()) + " exceeds its budget");
        rec.game_height = game.height();

        std::vector<detail::NodeEvents> events;
        for (const auto& s : result.states) {
            if (p - 1 >= static_cast<std::int64_t>(s.logs.size())) continue;
            events.push_back({s.id, game.has_token(s.id), &s.logs[p - 1].events});
        }
        NodeCenteredOutput form = detail::build_node_centered(events);
        std::vector<Traversal> traversals = derive_traversals(form, game);
        TraversalSet solution{traversals, form};
        TraversalValidation verdict = validate_traversals(game, solution);
        if (!verdict)
            throw InvariantViolation("phase " + std::to_string(p) +
                                     ": embedded game output invalid (" + verdict.message + ")");

        std::vector<int> loads_before;
        loads_before.reserve(g.node_count());
        for (NodeId v : g.nodes()) loads_before.push_back(replay.load(v));

        apply_flips(replay, traversals);
        for (const Traversal& t : traversals)
            rec.edges_flipped += static_cast<int>(t.size()) - 1;
        commit_orientations(replay, accepted);

        std::set<NodeId> destinations;
        for (const Traversal& t : traversals) destinations.insert(t.back());
        for (int i = 0; i < g.node_count(); ++i) {
            NodeId v = g.nodes()[i];
            int diff = replay.load(v) - loads_before[i];
            bool dest = destinations.count(v) > 0;
            if (diff != (dest ? 1 : 0))
                throw InvariantViolation("phase " + std::to_string(p) + ": load of node " +
                                         std::to_string(v) + " changed by " +
                                         std::to_string(diff) + (dest ? " as" : " without being") +
                                         " a token destination");
        }
        for (const auto& [a, b] : g.edges()) {
            auto h = replay.head(a, b);
            if (!h) continue;
            NodeId tail = *h == a ? b : a;
            if (replay.load(*h) - replay.load(tail) > 1)
                throw InvariantViolation("phase " + std::to_string(p) + ": edge (" +
                                         std::to_string(tail) + ", " + std::to_string(*h) +
                                         ") ends the phase with badness " +
                                         std::to_string(replay.load(*h) - replay.load(tail)));
        }

        // Slice the engine trace into this phase's game window.
        const std::int64_t len = orientation_phase_length(p, delta);
        rec.game_report.rounds = len - 3;
        for (const auto& row : run.report.trace) {
            if (row.round >= phase_start_round + 2 && row.round < phase_start_round + len - 1)
                rec.game_report.messages += row.messages;
        }
        phase_start_round += len;
        run.phases.push_back(std::move(rec));
    }

    // The replayed orientation must match what the nodes themselves hold.
    for (std::size_t i = 0; i < result.states.size(); ++i) {
        const auto& s = result.states[i];
        for (int pt = 0; pt < static_cast<int>(topo.ports(static_cast<int>(i)).size()); ++pt) {
            NodeId other = topo.ports(static_cast<int>(i))[pt].neighbor;
            auto h = replay.head(s.id, other);
            const auto& slot = s.edges[pt];
            bool match = h && ((slot.orient == Orient::toward_me && *h == s.id) ||
                               (slot.orient == Orient::toward_them && *h == other));
            if (!match)
                throw InvariantViolation("node " + std::to_string(s.id) +
                                         " disagrees with the replay about edge (" +
                                         std::to_string(s.id) + ", " + std::to_string(other) + ")");
        }
    }

    if (!replay.fully_oriented())
        throw InvariantViolation("run ended with unoriented edges");
    if (phases > max_phases)
        throw InvariantViolation("phase bound exceeded");
    if (run.report.rounds > orientation_round_bound(delta))
        throw InvariantViolation("round bound exceeded: " + std::to_string(run.report.rounds) +
                                 " > " + std::to_string(orientation_round_bound(delta)));
    return run;
}

}  // namespace tokendrop
