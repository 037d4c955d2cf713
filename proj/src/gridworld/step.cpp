#include "overgaze/gridworld/step.hpp"

#include <string>

#include "overgaze/common/error.hpp"

namespace og::gridworld {

GameState initial_state(const Layout& layout) {
    GameState s;
    for (int i = 0; i < 2; ++i) {
        s.players[i].pos = layout.spawns[i];
        s.players[i].dir = Orientation::Down;
        s.players[i].held = Item::None;
    }
    return s;
}

void check_state(const GameState& state, const Layout& layout) {
    for (int i = 0; i < 2; ++i) {
        if (!layout.is_floor(state.players[i].pos))
            throw ValidationError("state.players[" + std::to_string(i) + "].pos",
                                  "not on a floor tile");
    }
    if (state.players[0].pos == state.players[1].pos)
        throw ValidationError("state.players", "players occupy the same tile");
    for (const auto& [pos, pot] : state.pots) {
        if (!layout.in_bounds(pos) || layout.at(pos) != TileKind::Pot)
            throw ValidationError("state.pots", "pot entry not on a pot tile");
        if (pot.onions < 0 || pot.onions > kSoupOnions)
            throw ValidationError("state.pots", "onion count out of range");
        if (pot.onions == 0 && pot.timer == -1)
            throw ValidationError("state.pots", "empty pot entry must be omitted");
        if (pot.onions == kSoupOnions) {
            if (pot.timer < 0 || pot.timer > kCookTime)
                throw ValidationError("state.pots", "cook timer out of range");
        } else if (pot.timer != -1) {
            throw ValidationError("state.pots", "timer set on a pot with fewer than 3 onions");
        }
    }
    for (const auto& [pos, item] : state.counters) {
        if (!layout.in_bounds(pos) || layout.at(pos) != TileKind::Counter)
            throw ValidationError("state.counters", "item not on a counter tile");
        if (item == Item::None)
            throw ValidationError("state.counters", "counter entry holds no item");
    }
    if (state.score < 0 || state.score % kServeReward != 0)
        throw ValidationError("state.score", "score must be a non-negative multiple of 20");
    if (state.t < 0 || state.t >= kRoundSteps)
        throw ValidationError("state.t", "timestep out of range");
}

namespace {

// Applies one player's interact. Returns the subtask performed, if any.
// `served` enforces the one-serve-per-step rule.
bool apply_interact(GameState& s, const Layout& layout, int p, bool& served,
                    Subtask* performed) {
    PlayerState& pl = s.players[p];
    Coord d = orientation_delta(pl.dir);
    Coord faced{pl.pos.r + d.r, pl.pos.c + d.c};
    if (!layout.in_bounds(faced)) return false;

    switch (layout.at(faced)) {
        case TileKind::OnionDispenser:
            if (pl.held == Item::None) {
                pl.held = Item::Onion;
                *performed = Subtask::GetOnionFromDispenser;
                return true;
            }
            return false;
        case TileKind::DishDispenser:
            if (pl.held == Item::None) {
                pl.held = Item::Dish;
                *performed = Subtask::GetDishFromDispenser;
                return true;
            }
            return false;
        case TileKind::Pot: {
            PotState pot = s.pot_at(faced);
            if (pl.held == Item::Onion && pot.onions < kSoupOnions) {
                pot.onions += 1;
                if (pot.onions == kSoupOnions) pot.timer = kCookTime;
                s.pots[faced] = pot;
                pl.held = Item::None;
                *performed = Subtask::PutOnionInPot;
                return true;
            }
            if (pl.held == Item::Dish && pot.done()) {
                s.pots.erase(faced);
                pl.held = Item::Soup;
                *performed = Subtask::GetSoupFromPot;
                return true;
            }
            return false;
        }
        case TileKind::ServingWindow:
            if (pl.held == Item::Soup && !served) {
                pl.held = Item::None;
                s.score += kServeReward;
                served = true;
                *performed = Subtask::ServeSoup;
                return true;
            }
            return false;
        case TileKind::Counter: {
            auto it = s.counters.find(faced);
            if (pl.held != Item::None && it == s.counters.end()) {
                static const Subtask put[3] = {Subtask::PutOnionOnCounter,
                                               Subtask::PutDishOnCounter,
                                               Subtask::PutSoupOnCounter};
                s.counters[faced] = pl.held;
                *performed = put[static_cast<int>(pl.held) - 1];
                pl.held = Item::None;
                return true;
            }
            if (pl.held == Item::None && it != s.counters.end()) {
                static const Subtask get[3] = {Subtask::GetOnionFromCounter,
                                               Subtask::GetDishFromCounter,
                                               Subtask::GetSoupFromCounter};
                pl.held = it->second;
                *performed = get[static_cast<int>(it->second) - 1];
                s.counters.erase(it);
                return true;
            }
            return false;
        }
        default:
            return false;
    }
}

}  // namespace

StepResult step(const GameState& state, const Layout& layout,
                std::array<Action, 2> actions) {
    check_state(state, layout);
    if (state.t >= kRoundSteps)
        throw ValidationError("state.t", "round already over");

    StepResult res;
    res.state = state;
    GameState& s = res.state;
    int score_before = s.score;

    // Interacts, player 0 first.
    bool served = false;
    for (int p = 0; p < 2; ++p) {
        if (actions[p] != Action::Interact) continue;
        Subtask performed;
        if (apply_interact(s, layout, p, served, &performed))
            res.events.push_back({p, performed});
    }

    // Movement. Orientation updates even when the move is blocked —
    // walking into a wall turns in place.
    Coord want[2];
    for (int p = 0; p < 2; ++p) {
        want[p] = s.players[p].pos;
        if (!is_move(actions[p])) continue;
        Orientation o = move_orientation(actions[p]);
        s.players[p].dir = o;
        Coord d = orientation_delta(o);
        Coord target{s.players[p].pos.r + d.r, s.players[p].pos.c + d.c};
        if (layout.is_floor(target)) want[p] = target;
    }
    bool same_target = want[0] == want[1];
    bool swap = want[0] == s.players[1].pos && want[1] == s.players[0].pos &&
                want[0] != want[1];
    if (same_target || swap) {
        bool any_motion = want[0] != s.players[0].pos || want[1] != s.players[1].pos;
        if (any_motion) res.collision = true;  // symmetric no-op, nobody wins
    } else {
        s.players[0].pos = want[0];
        s.players[1].pos = want[1];
    }

    // Pot timers tick after actions, including pots filled this step.
    for (auto& [pos, pot] : s.pots)
        if (pot.timer > 0) pot.timer -= 1;

    s.t += 1;
    res.reward = s.score - score_before;
    return res;
}

}  // namespace og::gridworld
