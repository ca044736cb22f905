#pragma once

#include <algorithm>
#include <cstdint>

namespace tokendrop {

// Round and phase budgets, in raw communication rounds. Every algorithm here
// runs request/grant exchanges as two communication rounds, hence the factor
// 2 relative to the algorithm-level round counts.

// Proposal algorithm on a game of height L and max degree delta.
constexpr std::int64_t proposal_round_bound(std::int64_t height, std::int64_t delta) {
    return 2 * height * delta * delta + 2 * height + 4;
}

// Three-layer game (levels 0..2).
constexpr std::int64_t three_level_round_bound(std::int64_t delta) {
    return 2 * delta + 6;
}

// Hypergraph game of height L with max node degree S.
constexpr std::int64_t hyper_round_bound(std::int64_t height, std::int64_t s_deg) {
    return 2 * height * s_deg * s_deg + 2 * height + 4;
}

// Embedded game window inside one orientation/assignment phase. Phase 1 plays
// a height-0 game (nothing oriented yet), which needs no rounds at all.
constexpr std::int64_t game_window(std::int64_t height, std::int64_t deg) {
    return height == 0 ? 0 : proposal_round_bound(height, deg);
}

// Rounds in phase p (1-based) of the orientation algorithm: load exchange,
// accept + token announcements, game window, drain/commit. The game height in
// phase p is at most min(p - 1, delta) since loads grow by at most 1 a phase.
constexpr std::int64_t orientation_phase_length(std::int64_t phase, std::int64_t delta) {
    return 3 + game_window(std::min(phase - 1, delta), delta);
}

constexpr std::int64_t orientation_phase_bound(std::int64_t delta) { return 2 * delta; }

constexpr std::int64_t orientation_round_bound(std::int64_t delta) {
    return 4 * delta * delta * delta * delta;
}

constexpr std::int64_t assignment_phase_length(std::int64_t phase, std::int64_t s_deg) {
    return 3 + game_window(std::min(phase - 1, s_deg), s_deg);
}

constexpr std::int64_t assignment_phase_bound(std::int64_t c_deg, std::int64_t s_deg) {
    return 2 * c_deg * s_deg;
}

constexpr std::int64_t assignment_round_bound(std::int64_t c_deg, std::int64_t s_deg) {
    return 4 * c_deg * s_deg * s_deg * s_deg * s_deg;
}

// Redirect iterations of the 0-1-many algorithm, and the raw-round version
// (two rounds per iteration plus slack).
constexpr std::int64_t two_bounded_iteration_bound(std::int64_t c_deg) { return c_deg + 2; }

constexpr std::int64_t two_bounded_round_bound(std::int64_t c_deg) { return 2 * c_deg + 6; }

}  // namespace tokendrop
