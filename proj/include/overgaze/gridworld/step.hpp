#pragma once

#include "overgaze/gridworld/layout.hpp"
#include "overgaze/gridworld/types.hpp"

namespace og::gridworld {

struct StepResult {
    GameState state;
    int reward = 0;  // team reward this step, 0 or kServeReward
    std::vector<InteractEvent> events;
    bool collision = false;
};

GameState initial_state(const Layout& layout);

// Throws ValidationError if the state is inconsistent with the layout.
void check_state(const GameState& state, const Layout& layout);

// One deterministic environment step.
//
// Resolution order: interacts (player 0 then player 1) against the current
// state, then joint movement, then pot timers, then t+1. Movement: a move
// action always sets orientation; the player advances only onto a floor
// tile. If both players want the same tile, or want to swap tiles, neither
// moves and the step is flagged as a collision. At most one soup can be
// served per step; a second simultaneous serve is a no-op (the player keeps
// the soup and can serve next step), which keeps per-step rewards in
// {0, 20}.
StepResult step(const GameState& state, const Layout& layout,
                std::array<Action, 2> actions);

}  // namespace og::gridworld
