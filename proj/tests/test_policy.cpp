// Scripted players: BFS distances against an independent flood fill, the
// random baseline's uniformity, rigid/adaptive goal selection, partner
// avoidance, and the skill-noise substitution contract.

#include <doctest.h>

#include <array>
#include <deque>
#include <set>

#include "overgaze/common/error.hpp"
#include "overgaze/common/rng.hpp"
#include "overgaze/gridworld/layout.hpp"
#include "overgaze/gridworld/policy.hpp"
#include "overgaze/gridworld/step.hpp"

using namespace og;
using namespace og::gridworld;

namespace {

// Independent oracle: frontier-at-a-time flood fill instead of a queue.
std::vector<int> flood_distances(const Layout& lay, Coord from, const std::vector<Coord>& blocked) {
    auto idx = [&](Coord p) { return static_cast<size_t>(p.r) * lay.cols + p.c; };
    std::vector<int> dist(lay.tiles.size(), -1);
    std::set<Coord> walls(blocked.begin(), blocked.end());
    if (!lay.is_floor(from) || walls.count(from)) return dist;
    std::vector<Coord> frontier{from};
    dist[idx(from)] = 0;
    for (int d = 1; !frontier.empty(); ++d) {
        std::vector<Coord> next;
        for (Coord cur : frontier)
            for (Coord n : {Coord{cur.r - 1, cur.c}, Coord{cur.r + 1, cur.c},
                            Coord{cur.r, cur.c - 1}, Coord{cur.r, cur.c + 1}}) {
                if (!lay.is_floor(n) || walls.count(n) || dist[idx(n)] >= 0) continue;
                dist[idx(n)] = d;
                next.push_back(n);
            }
        frontier = std::move(next);
    }
    return dist;
}

}  // namespace

TEST_CASE("bfs_distances matches an independent flood fill") {
    Rng rng(derive_seed(3, "bfs-oracle"));
    for (const std::string& name : builtin_layout_names()) {
        const Layout& lay = builtin_layout(name);
        std::vector<Coord> floors = lay.tiles_of(TileKind::Floor);
        for (int trial = 0; trial < 50; ++trial) {
            Coord from = floors[rng.uniform_int(static_cast<int>(floors.size()))];
            std::vector<Coord> blocked;
            int n_blocked = rng.uniform_int(3);
            for (int b = 0; b < n_blocked; ++b)
                blocked.push_back(floors[rng.uniform_int(static_cast<int>(floors.size()))]);
            CHECK(bfs_distances(lay, from, blocked) == flood_distances(lay, from, blocked));
        }
    }
}

TEST_CASE("bfs_distances routes around blocked tiles") {
    const Layout& ring = builtin_layout("coordination_ring");
    auto at = [&](const std::vector<int>& d, Coord p) { return d[p.r * ring.cols + p.c]; };

    std::vector<int> open = bfs_distances(ring, {1, 1});
    CHECK(at(open, {1, 1}) == 0);
    CHECK(at(open, {1, 3}) == 2);   // straight across the top
    CHECK(at(open, {0, 0}) == -1);  // counters are never reachable
    CHECK(at(open, {2, 2}) == -1);

    // Blocking the top corridor forces the long way around the ring.
    std::vector<int> detour = bfs_distances(ring, {1, 1}, {{1, 2}});
    CHECK(at(detour, {1, 2}) == -1);
    CHECK(at(detour, {1, 3}) == 6);

    // Starting on a wall or a blocked tile reaches nothing.
    std::vector<int> none = bfs_distances(ring, {0, 0});
    for (int d : none) CHECK(d == -1);
    none = bfs_distances(ring, {1, 1}, {{1, 1}});
    for (int d : none) CHECK(d == -1);
}

TEST_CASE("random policy draws near-uniform actions and ignores skill") {
    const Layout& lay = builtin_layout("coordination_ring");
    GameState s = initial_state(lay);
    Rng rng(derive_seed(11, "random-policy"));
    PolicyConfig cfg{PolicyKind::Random, 0.0};  // skill must not matter

    std::array<int, kNumActions> counts{};
    const int n = 6000;
    for (int i = 0; i < n; ++i) {
        Decision d = decide(cfg, s, lay, 0, rng);
        counts[static_cast<int>(d.action)] += 1;
        CHECK(d.intent == -1);
        CHECK(d.goal_tile == s.players[0].pos);
    }
    for (int c : counts) {
        CHECK(c > 830);
        CHECK(c < 1170);
    }
}

TEST_CASE("skill 1.0 planners consume no randomness") {
    const Layout& lay = builtin_layout("asymmetric_advantages");
    GameState s = initial_state(lay);
    PolicyConfig cfg{PolicyKind::Rigid, 1.0};
    Rng a(1), b(999999);
    for (int t = 0; t < 25; ++t) {
        Decision da = decide(cfg, s, lay, 0, a);
        Decision db = decide(cfg, s, lay, 0, b);
        CHECK(da.action == db.action);
        CHECK(da.goal_tile == db.goal_tile);
        CHECK(da.intent == db.intent);
        s = step(s, lay, {da.action, Action::Stay}).state;
    }
    // And the streams really were untouched.
    CHECK(Rng(1).next_u64() == a.next_u64());
}

TEST_CASE("skill noise substitutes actions at the configured rate") {
    const Layout& lay = builtin_layout("coordination_ring");
    GameState s = initial_state(lay);
    Rng clean(0);
    Decision planned = decide({PolicyKind::Rigid, 1.0}, s, lay, 0, clean);

    Rng noisy(derive_seed(5, "skill-noise"));
    int substituted = 0;
    const int n = 4000;
    for (int i = 0; i < n; ++i) {
        Decision d = decide({PolicyKind::Rigid, 0.5}, s, lay, 0, noisy);
        // Only the action is noised; the plan itself is untouched.
        CHECK(d.goal_tile == planned.goal_tile);
        CHECK(d.intent == planned.intent);
        if (d.action != planned.action) ++substituted;
    }
    // Half the draws substitute, and 1/6 of substitutes hit the planned
    // action anyway: expect n * 0.5 * 5/6 ≈ 1667 visible changes.
    CHECK(substituted > 1450);
    CHECK(substituted < 1900);
}

TEST_CASE("two rigid players run their own kitchens to a score") {
    const Layout& lay = builtin_layout("asymmetric_advantages");
    GameState s = initial_state(lay);
    Rng r0(derive_seed(21, "rigid0")), r1(derive_seed(21, "rigid1"));
    PolicyConfig cfg{PolicyKind::Rigid, 1.0};
    for (int t = 0; t < kRoundSteps; ++t) {
        Decision d0 = decide(cfg, s, lay, 0, r0);
        Decision d1 = decide(cfg, s, lay, 1, r1);
        CHECK(d0.intent >= -1);
        CHECK(d0.intent < kNumSubtasks);
        CHECK(lay.in_bounds(d0.goal_tile));
        s = step(s, lay, {d0.action, d1.action}).state;
    }
    CHECK(s.score >= 2 * kServeReward);
}

TEST_CASE("adaptive planner paths around the partner's tile") {
    const Layout& lay = builtin_layout("coordination_ring");
    GameState s = initial_state(lay);
    // Partner parks mid-corridor facing the center counter; the onion
    // dispenser approach (2,3) is reachable both ways.
    s.players[1].pos = {1, 2};
    s.players[1].dir = Orientation::Down;
    Rng rng(0);

    Decision rigid = decide({PolicyKind::Rigid, 1.0}, s, lay, 0, rng);
    CHECK(rigid.intent == static_cast<int>(Subtask::GetOnionFromDispenser));
    CHECK(rigid.action == Action::Right);  // straight through the partner

    Decision adaptive = decide({PolicyKind::Adaptive, 1.0}, s, lay, 0, rng);
    CHECK(adaptive.intent == static_cast<int>(Subtask::GetOnionFromDispenser));
    CHECK(adaptive.action == Action::Down);  // detour under the ring
}

TEST_CASE("adaptive planner cedes a claimed pot") {
    const Layout& lay = builtin_layout("coordination_ring");
    GameState s = initial_state(lay);
    s.pots[{0, 2}] = {3, 0};  // soup ready
    s.players[0].pos = {3, 2};
    s.players[0].held = Item::Dish;
    s.players[1].pos = {1, 1};
    s.players[1].dir = Orientation::Down;
    s.players[1].held = Item::Dish;  // partner is coming for the same pot
    Rng rng(0);

    // Rigid ignores the partner and goes for the soup.
    Decision rigid = decide({PolicyKind::Rigid, 1.0}, s, lay, 0, rng);
    CHECK(rigid.intent == static_cast<int>(Subtask::GetSoupFromPot));
    CHECK(rigid.goal_tile == Coord{0, 2});

    // Adaptive treats the nearer dish-carrier's pot as claimed and parks
    // its dish instead.
    Decision adaptive = decide({PolicyKind::Adaptive, 1.0}, s, lay, 0, rng);
    CHECK(adaptive.intent == static_cast<int>(Subtask::PutDishOnCounter));
    CHECK(adaptive.goal_tile != Coord{0, 2});
}

TEST_CASE("a planner with nothing to do stays put") {
    Layout lay = parse_layout("XOPDX\nX1 2X\nXXSXX\n", "mini");
    GameState s = initial_state(lay);
    s.pots[{0, 2}] = {3, kCookTime};  // cooking, not fillable
    for (Coord c : lay.tiles_of(TileKind::Counter)) s.counters[c] = Item::Onion;
    s.players[0].held = Item::Onion;  // nowhere to put it
    Rng rng(0);

    Decision d = decide({PolicyKind::Rigid, 1.0}, s, lay, 0, rng);
    CHECK(d.action == Action::Stay);
    CHECK(d.intent == -1);
    CHECK(d.goal_tile == s.players[0].pos);
}

TEST_CASE("policy kind names round-trip") {
    for (int i = 0; i < 3; ++i) {
        PolicyKind k = static_cast<PolicyKind>(i);
        CHECK(policy_kind_from_name(policy_kind_name(k)) == k);
    }
    CHECK_THROWS_AS(policy_kind_from_name("clairvoyant"), ConfigError);
}
