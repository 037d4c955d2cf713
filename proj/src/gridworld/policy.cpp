#include "overgaze/gridworld/policy.hpp"

#include <algorithm>
#include <deque>
#include <limits>

#include "overgaze/common/error.hpp"

namespace og::gridworld {

const char* policy_kind_name(PolicyKind k) {
    static const char* names[3] = {"random", "rigid", "adaptive"};
    return names[static_cast<int>(k)];
}

PolicyKind policy_kind_from_name(const std::string& s) {
    for (int i = 0; i < 3; ++i)
        if (s == policy_kind_name(static_cast<PolicyKind>(i))) return static_cast<PolicyKind>(i);
    throw ConfigError("unknown policy kind '" + s + "'");
}

std::vector<int> bfs_distances(const Layout& layout, Coord from,
                               const std::vector<Coord>& blocked) {
    std::vector<int> dist(layout.tiles.size(), -1);
    auto idx = [&](Coord p) { return static_cast<size_t>(p.r) * layout.cols + p.c; };
    std::vector<char> wall(layout.tiles.size(), 0);
    for (Coord b : blocked)
        if (layout.in_bounds(b)) wall[idx(b)] = 1;
    if (!layout.is_floor(from) || wall[idx(from)]) return dist;
    std::deque<Coord> q{from};
    dist[idx(from)] = 0;
    while (!q.empty()) {
        Coord cur = q.front();
        q.pop_front();
        const Coord nbors[4] = {{cur.r - 1, cur.c}, {cur.r + 1, cur.c},
                                {cur.r, cur.c - 1}, {cur.r, cur.c + 1}};
        for (Coord n : nbors) {
            if (!layout.is_floor(n) || wall[idx(n)]) continue;
            if (dist[idx(n)] >= 0) continue;
            dist[idx(n)] = dist[idx(cur)] + 1;
            q.push_back(n);
        }
    }
    return dist;
}

namespace {

Orientation facing_toward(Coord from, Coord to) {
    if (to.r < from.r) return Orientation::Up;
    if (to.r > from.r) return Orientation::Down;
    if (to.c < from.c) return Orientation::Left;
    return Orientation::Right;
}

Action move_action(Orientation o) { return static_cast<Action>(o); }

struct Goal {
    Subtask intent;
    Coord feature;  // tile to interact with
    bool wait_for_cook = false;
};

// Nearest floor tile adjacent to `feature` by BFS distance; ties resolved
// by tile order. Returns nullopt if no adjacent tile is reachable.
std::optional<Coord> nearest_approach(const Layout& layout, const std::vector<int>& dist,
                                      Coord feature) {
    std::optional<Coord> best;
    int best_d = std::numeric_limits<int>::max();
    const Coord nbors[4] = {{feature.r - 1, feature.c}, {feature.r + 1, feature.c},
                            {feature.r, feature.c - 1}, {feature.r, feature.c + 1}};
    for (Coord n : nbors) {
        if (!layout.is_floor(n)) continue;
        int d = dist[static_cast<size_t>(n.r) * layout.cols + n.c];
        if (d < 0) continue;
        if (d < best_d || (d == best_d && best && n < *best)) {
            best_d = d;
            best = n;
        }
    }
    return best;
}

// Among candidate feature tiles, the one whose best approach is nearest.
std::optional<Coord> nearest_feature(const Layout& layout, const std::vector<int>& dist,
                                     const std::vector<Coord>& features) {
    std::optional<Coord> best;
    int best_d = std::numeric_limits<int>::max();
    for (Coord f : features) {
        auto app = nearest_approach(layout, dist, f);
        if (!app) continue;
        int d = dist[static_cast<size_t>(app->r) * layout.cols + app->c];
        if (d < best_d || (d == best_d && best && f < *best)) {
            best_d = d;
            best = f;
        }
    }
    return best;
}

std::vector<Coord> counters_with(const GameState& s, Item item) {
    std::vector<Coord> out;
    for (const auto& [pos, it] : s.counters)
        if (it == item) out.push_back(pos);
    return out;
}

std::vector<Coord> free_counters(const GameState& s, const Layout& layout) {
    std::vector<Coord> out;
    for (Coord c : layout.tiles_of(TileKind::Counter))
        if (!s.counters.count(c)) out.push_back(c);
    return out;
}

// Subtask priority given what the player holds. `excluded_pots` are pots
// claimed by the partner (adaptive only; empty for rigid).
std::optional<Goal> choose_goal(const GameState& s, const Layout& layout, int player,
                                const std::vector<int>& dist,
                                const std::vector<Coord>& excluded_pots) {
    auto excluded = [&](Coord p) {
        return std::find(excluded_pots.begin(), excluded_pots.end(), p) != excluded_pots.end();
    };
    std::vector<Coord> pot_tiles = layout.tiles_of(TileKind::Pot);
    std::vector<Coord> ready, cooking, fillable;
    for (Coord p : pot_tiles) {
        PotState pot = s.pot_at(p);
        if (pot.done() && !excluded(p)) ready.push_back(p);
        if (pot.cooking() && !excluded(p)) cooking.push_back(p);
        if (pot.onions < kSoupOnions) fillable.push_back(p);
    }

    switch (s.players[player].held) {
        case Item::Soup: {
            auto f = nearest_feature(layout, dist, layout.tiles_of(TileKind::ServingWindow));
            if (f) return Goal{Subtask::ServeSoup, *f};
            return std::nullopt;
        }
        case Item::Dish: {
            if (auto f = nearest_feature(layout, dist, ready))
                return Goal{Subtask::GetSoupFromPot, *f};
            if (auto f = nearest_feature(layout, dist, cooking))
                return Goal{Subtask::GetSoupFromPot, *f, true};
            if (auto f = nearest_feature(layout, dist, free_counters(s, layout)))
                return Goal{Subtask::PutDishOnCounter, *f};
            return std::nullopt;
        }
        case Item::Onion: {
            if (auto f = nearest_feature(layout, dist, fillable))
                return Goal{Subtask::PutOnionInPot, *f};
            if (auto f = nearest_feature(layout, dist, free_counters(s, layout)))
                return Goal{Subtask::PutOnionOnCounter, *f};
            return std::nullopt;
        }
        case Item::None:
        default: {
            bool need_dish = !ready.empty() || !cooking.empty();
            if (need_dish) {
                // Counter dish beats the dispenser only when strictly closer.
                auto disp = nearest_feature(layout, dist, layout.tiles_of(TileKind::DishDispenser));
                auto counter = nearest_feature(layout, dist, counters_with(s, Item::Dish));
                if (counter && disp) {
                    auto da = nearest_approach(layout, dist, *disp);
                    auto ca = nearest_approach(layout, dist, *counter);
                    int dd = dist[static_cast<size_t>(da->r) * layout.cols + da->c];
                    int cd = dist[static_cast<size_t>(ca->r) * layout.cols + ca->c];
                    if (cd < dd) return Goal{Subtask::GetDishFromCounter, *counter};
                    return Goal{Subtask::GetDishFromDispenser, *disp};
                }
                if (counter) return Goal{Subtask::GetDishFromCounter, *counter};
                if (disp) return Goal{Subtask::GetDishFromDispenser, *disp};
            }
            auto disp = nearest_feature(layout, dist, layout.tiles_of(TileKind::OnionDispenser));
            auto counter = nearest_feature(layout, dist, counters_with(s, Item::Onion));
            if (counter && disp) {
                auto da = nearest_approach(layout, dist, *disp);
                auto ca = nearest_approach(layout, dist, *counter);
                int dd = dist[static_cast<size_t>(da->r) * layout.cols + da->c];
                int cd = dist[static_cast<size_t>(ca->r) * layout.cols + ca->c];
                if (cd < dd) return Goal{Subtask::GetOnionFromCounter, *counter};
                return Goal{Subtask::GetOnionFromDispenser, *disp};
            }
            if (counter) return Goal{Subtask::GetOnionFromCounter, *counter};
            if (disp) return Goal{Subtask::GetOnionFromDispenser, *disp};
            return std::nullopt;
        }
    }
}

// Walks one BFS-optimal step toward the goal's approach tile, or
// turns/interacts on arrival. `blocked` must match the set used to build
// `dist` so the walked path respects the same obstacles.
Action act_toward(const GameState& s, const Layout& layout, int player,
                  const std::vector<int>& dist, const std::vector<Coord>& blocked,
                  const Goal& goal) {
    Coord pos = s.players[player].pos;
    auto app = nearest_approach(layout, dist, goal.feature);
    if (!app) return Action::Stay;
    if (pos == *app) {
        Orientation want = facing_toward(pos, goal.feature);
        if (s.players[player].dir != want) return move_action(want);
        if (goal.wait_for_cook && !s.pot_at(goal.feature).done()) return Action::Stay;
        return Action::Interact;
    }
    // Step to the neighbor whose distance-to-approach is one less than ours;
    // measured by a reverse BFS from the approach tile over the same walls.
    std::vector<int> back = bfs_distances(layout, *app, blocked);
    auto dat = [&](Coord p) {
        return layout.in_bounds(p) ? back[static_cast<size_t>(p.r) * layout.cols + p.c] : -1;
    };
    int here = dat(pos);
    if (here <= 0) return Action::Stay;  // unreachable or already there
    const Orientation order[4] = {Orientation::Up, Orientation::Down, Orientation::Left,
                                  Orientation::Right};
    for (Orientation o : order) {
        Coord d = orientation_delta(o);
        Coord n{pos.r + d.r, pos.c + d.c};
        if (layout.is_floor(n) && dat(n) == here - 1) return move_action(o);
    }
    return Action::Stay;
}

// The pot the partner appears committed to, given what they carry.
std::vector<Coord> partner_claims(const GameState& s, const Layout& layout, int partner) {
    std::vector<Coord> claims;
    if (s.players[partner].held != Item::Dish) return claims;
    std::vector<int> pdist = bfs_distances(layout, s.players[partner].pos);
    std::vector<Coord> targets;
    for (Coord p : layout.tiles_of(TileKind::Pot)) {
        PotState pot = s.pot_at(p);
        if (pot.done() || pot.cooking()) targets.push_back(p);
    }
    if (auto f = nearest_feature(layout, pdist, targets)) claims.push_back(*f);
    return claims;
}

Decision plan(const GameState& s, const Layout& layout, int player, bool adaptive) {
    Decision dec;
    dec.goal_tile = s.players[player].pos;
    Coord me = s.players[player].pos;
    int partner = 1 - player;

    std::vector<Coord> excluded;
    std::vector<Coord> blocked;
    std::vector<int> dist;
    if (adaptive) {
        excluded = partner_claims(s, layout, partner);
        Coord ppos = s.players[partner].pos;
        Coord pd = orientation_delta(s.players[partner].dir);
        Coord pnext{ppos.r + pd.r, ppos.c + pd.c};
        auto any_reachable = [&] {
            for (int d : dist)
                if (d > 0) return true;
            return false;
        };
        blocked = {ppos, pnext};
        dist = bfs_distances(layout, me, blocked);
        if (!any_reachable()) {
            blocked = {ppos};
            dist = bfs_distances(layout, me, blocked);
        }
        if (!any_reachable()) {
            blocked.clear();
            dist = bfs_distances(layout, me);
        }
    } else {
        dist = bfs_distances(layout, me);
    }

    auto goal = choose_goal(s, layout, player, dist, excluded);
    if (!goal && adaptive) {
        // Claims left nothing to do; fall back to the unclaimed plan.
        goal = choose_goal(s, layout, player, dist, {});
    }
    if (!goal) return dec;
    dec.goal_tile = goal->feature;
    dec.intent = static_cast<int>(goal->intent);
    dec.action = act_toward(s, layout, player, dist, blocked, *goal);
    return dec;
}

}  // namespace

Decision decide(const PolicyConfig& cfg, const GameState& state, const Layout& layout,
                int player, Rng& rng) {
    if (cfg.kind == PolicyKind::Random) {
        Decision d;
        d.action = static_cast<Action>(rng.uniform_int(kNumActions));
        d.goal_tile = state.players[player].pos;
        return d;
    }
    Decision d = plan(state, layout, player, cfg.kind == PolicyKind::Adaptive);
    if (cfg.skill < 1.0 && rng.uniform() < 1.0 - cfg.skill)
        d.action = static_cast<Action>(rng.uniform_int(kNumActions));
    return d;
}

Action scripted_policy(const PolicyConfig& cfg, const GameState& state,
                       const Layout& layout, int player, Rng& rng) {
    return decide(cfg, state, layout, player, rng).action;
}

}  // namespace og::gridworld
