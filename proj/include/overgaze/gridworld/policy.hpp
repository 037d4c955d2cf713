#pragma once

#include <optional>

#include "overgaze/common/rng.hpp"
#include "overgaze/gridworld/step.hpp"

namespace og::gridworld {

enum class PolicyKind : uint8_t { Random, Rigid, Adaptive };

const char* policy_kind_name(PolicyKind k);
PolicyKind policy_kind_from_name(const std::string& s);

// skill < 1 substitutes a uniformly random action with probability
// (1 - skill); used for the human proxy, ignored by Random.
struct PolicyConfig {
    PolicyKind kind = PolicyKind::Rigid;
    double skill = 1.0;
};

struct Decision {
    Action action = Action::Stay;
    Coord goal_tile;   // feature tile currently pursued; own tile if none
    int intent = -1;   // Subtask id being pursued, -1 if none
};

// One action for `player` in `state`. Random draws uniformly over the six
// actions. Rigid plans shortest paths over a fixed subtask priority and
// ignores the partner entirely. Adaptive replans every step, skips pots the
// partner has visibly claimed (e.g. partner carrying a dish claims the
// nearest ready pot) and paths around the partner's tile and the tile the
// partner is facing.
Decision decide(const PolicyConfig& cfg, const GameState& state, const Layout& layout,
                int player, Rng& rng);

// Convenience wrapper matching the one-value contract.
Action scripted_policy(const PolicyConfig& cfg, const GameState& state,
                       const Layout& layout, int player, Rng& rng);

// Breadth-first distances from `from` over floor tiles, treating `blocked`
// tiles as walls. Unreachable tiles get -1. Exposed for planner tests.
std::vector<int> bfs_distances(const Layout& layout, Coord from,
                               const std::vector<Coord>& blocked = {});

}  // namespace og::gridworld
