#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tokendrop/token_game.hpp"

namespace tokendrop::detail {

// Chronological token movement at one node; enough to rebuild the
// node-centered output (order matters, rounds are for diagnostics).
struct TokenEvent {
    bool received = false;  // false = passed down
    NodeId other = 0;
    std::int64_t round = 0;
};

struct NodeEvents {
    NodeId id = 0;
    bool initial_token = false;
    const std::vector<TokenEvent>* events = nullptr;
};

inline NodeCenteredOutput build_node_centered(const std::vector<NodeEvents>& all) {
    NodeCenteredOutput form;
    for (const NodeEvents& ne : all) {
        if (ne.events == nullptr || ne.events->empty()) continue;
        NodeCenteredEntry entry;
        std::optional<NodeId> held_from;
        bool holding = ne.initial_token;
        for (const TokenEvent& ev : *ne.events) {
            if (ev.received) {
                holding = true;
                held_from = ev.other;
            } else if (held_from) {
                entry.through.emplace_back(*held_from, ev.other);
                held_from.reset();
                holding = false;
            } else {
                entry.origin_out = ev.other;
                holding = false;
            }
        }
        if (holding && held_from) entry.destination_in = *held_from;
        form.emplace(ne.id, std::move(entry));
    }
    return form;
}

}  // namespace tokendrop::detail
