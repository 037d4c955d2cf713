#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace og::gridworld {

// Round geometry: 400 timesteps at 5 FPS (80 s), gaze sampled at ~300 Hz,
// so 60 gaze samples per game timestep.
inline constexpr int kRoundSteps = 400;
inline constexpr int kFps = 5;
inline constexpr int64_t kStepMicros = 1000000 / kFps;  // 200000
inline constexpr int kGazePerStep = 60;
inline constexpr int kCookTime = 20;   // timesteps from third onion to done
inline constexpr int kSoupOnions = 3;  // fixed recipe
inline constexpr int kServeReward = 20;

struct Coord {
    int r = 0;
    int c = 0;
    auto operator<=>(const Coord&) const = default;
};

enum class TileKind : uint8_t {
    Floor,
    Counter,
    OnionDispenser,
    DishDispenser,
    Pot,
    ServingWindow,
};

enum class Item : uint8_t { None, Onion, Dish, Soup };

enum class Orientation : uint8_t { Up, Down, Left, Right };

enum class Action : uint8_t { Up, Down, Left, Right, Interact, Stay };
inline constexpr int kNumActions = 6;

// The eleven atomic state-changing interactions. Ids are wire format.
enum class Subtask : uint8_t {
    GetOnionFromDispenser = 0,
    GetOnionFromCounter = 1,
    PutOnionInPot = 2,
    PutOnionOnCounter = 3,
    GetDishFromDispenser = 4,
    GetDishFromCounter = 5,
    PutDishOnCounter = 6,
    GetSoupFromPot = 7,
    GetSoupFromCounter = 8,
    PutSoupOnCounter = 9,
    ServeSoup = 10,
};
inline constexpr int kNumSubtasks = 11;

const char* subtask_name(Subtask s);
const char* action_name(Action a);
const char* orientation_name(Orientation o);
const char* item_name(Item i);
Action action_from_name(const std::string& s);
Orientation orientation_from_name(const std::string& s);
Item item_from_name(const std::string& s);

inline Coord orientation_delta(Orientation o) {
    switch (o) {
        case Orientation::Up: return {-1, 0};
        case Orientation::Down: return {1, 0};
        case Orientation::Left: return {0, -1};
        default: return {0, 1};
    }
}

inline bool is_move(Action a) { return a <= Action::Right; }

inline Orientation move_orientation(Action a) { return static_cast<Orientation>(a); }

struct PlayerState {
    Coord pos;
    Orientation dir = Orientation::Down;
    Item held = Item::None;
    bool operator==(const PlayerState&) const = default;
};

// timer: -1 while the pot has fewer than three onions, then counts
// kCookTime..0; 0 with three onions means the soup is ready.
struct PotState {
    int onions = 0;
    int timer = -1;
    bool operator==(const PotState&) const = default;
    bool cooking() const { return onions == kSoupOnions && timer > 0; }
    bool done() const { return onions == kSoupOnions && timer == 0; }
};

struct GameState {
    std::array<PlayerState, 2> players;  // [0] human proxy, [1] AI teammate
    std::map<Coord, PotState> pots;      // empty pots are always omitted
    std::map<Coord, Item> counters;      // occupied counter tiles only
    int score = 0;
    int t = 0;
    bool operator==(const GameState&) const = default;

    PotState pot_at(Coord p) const {
        auto it = pots.find(p);
        return it == pots.end() ? PotState{} : it->second;
    }
};

struct InteractEvent {
    int player = 0;
    Subtask id = Subtask::GetOnionFromDispenser;
    bool operator==(const InteractEvent&) const = default;
};

}  // namespace og::gridworld
