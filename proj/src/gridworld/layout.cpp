#include "overgaze/gridworld/layout.hpp"

#include <deque>
#include <map>
#include <sstream>

#include "overgaze/common/error.hpp"
#include "overgaze/common/io.hpp"

namespace og::gridworld {

const char* subtask_name(Subtask s) {
    static const char* names[kNumSubtasks] = {
        "get_onion_from_dispenser", "get_onion_from_counter", "put_onion_in_pot",
        "put_onion_on_counter",     "get_dish_from_dispenser", "get_dish_from_counter",
        "put_dish_on_counter",      "get_soup_from_pot",       "get_soup_from_counter",
        "put_soup_on_counter",      "serve_soup"};
    return names[static_cast<int>(s)];
}

const char* action_name(Action a) {
    static const char* names[kNumActions] = {"up", "down", "left", "right", "interact", "stay"};
    return names[static_cast<int>(a)];
}

const char* orientation_name(Orientation o) {
    static const char* names[4] = {"up", "down", "left", "right"};
    return names[static_cast<int>(o)];
}

const char* item_name(Item i) {
    static const char* names[4] = {"none", "onion", "dish", "soup"};
    return names[static_cast<int>(i)];
}

Action action_from_name(const std::string& s) {
    for (int i = 0; i < kNumActions; ++i)
        if (s == action_name(static_cast<Action>(i))) return static_cast<Action>(i);
    throw ParseError("unknown action '" + s + "'");
}

Orientation orientation_from_name(const std::string& s) {
    for (int i = 0; i < 4; ++i)
        if (s == orientation_name(static_cast<Orientation>(i))) return static_cast<Orientation>(i);
    throw ParseError("unknown orientation '" + s + "'");
}

Item item_from_name(const std::string& s) {
    for (int i = 0; i < 4; ++i)
        if (s == item_name(static_cast<Item>(i))) return static_cast<Item>(i);
    throw ParseError("unknown item '" + s + "'");
}

std::vector<Coord> Layout::tiles_of(TileKind k) const {
    std::vector<Coord> out;
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            if (at({r, c}) == k) out.push_back({r, c});
    return out;
}

namespace {

TileKind tile_from_char(char ch, int line) {
    switch (ch) {
        case 'X': return TileKind::Counter;
        case ' ': case '1': case '2': return TileKind::Floor;
        case 'O': return TileKind::OnionDispenser;
        case 'D': return TileKind::DishDispenser;
        case 'P': return TileKind::Pot;
        case 'S': return TileKind::ServingWindow;
        default: throw ParseError(std::string("unknown tile character '") + ch + "'", line);
    }
}

std::vector<Coord> neighbors4(Coord p) {
    return {{p.r - 1, p.c}, {p.r + 1, p.c}, {p.r, p.c - 1}, {p.r, p.c + 1}};
}

void validate(const Layout& lay, bool spawn_seen[2]) {
    if (!spawn_seen[0] || !spawn_seen[1])
        throw ValidationError("layout.spawns", "layout must contain both '1' and '2'");
    for (int r = 0; r < lay.rows; ++r)
        for (int c = 0; c < lay.cols; ++c) {
            bool border = r == 0 || c == 0 || r == lay.rows - 1 || c == lay.cols - 1;
            if (border && lay.at({r, c}) == TileKind::Floor)
                throw ValidationError("layout.grid", "grid is not enclosed at (" +
                                                         std::to_string(r) + "," + std::to_string(c) + ")");
        }

    // Reachability from each spawn: flood floor, then require an adjacent
    // feature tile of every kind.
    for (int p = 0; p < 2; ++p) {
        std::vector<char> seen(lay.tiles.size(), 0);
        std::deque<Coord> q{lay.spawns[p]};
        seen[static_cast<size_t>(lay.spawns[p].r) * lay.cols + lay.spawns[p].c] = 1;
        bool found[4] = {false, false, false, false};  // onion, dish, pot, serve
        while (!q.empty()) {
            Coord cur = q.front();
            q.pop_front();
            for (Coord n : neighbors4(cur)) {
                if (!lay.in_bounds(n)) continue;
                TileKind k = lay.at(n);
                if (k == TileKind::OnionDispenser) found[0] = true;
                if (k == TileKind::DishDispenser) found[1] = true;
                if (k == TileKind::Pot) found[2] = true;
                if (k == TileKind::ServingWindow) found[3] = true;
                size_t idx = static_cast<size_t>(n.r) * lay.cols + n.c;
                if (k == TileKind::Floor && !seen[idx]) {
                    seen[idx] = 1;
                    q.push_back(n);
                }
            }
        }
        static const char* what[4] = {"onion dispenser", "dish dispenser", "pot", "serving window"};
        for (int f = 0; f < 4; ++f)
            if (!found[f])
                throw ValidationError("layout.reachability",
                                      std::string("no ") + what[f] + " reachable from spawn " +
                                          std::to_string(p + 1));
    }
}

}  // namespace

Layout parse_layout(const std::string& text, const std::string& name) {
    Layout lay;
    lay.name = name;
    std::vector<std::string> lines;
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    if (lines.empty()) throw ParseError("empty layout");

    lay.rows = static_cast<int>(lines.size());
    lay.cols = static_cast<int>(lines[0].size());
    bool spawn_seen[2] = {false, false};
    for (int r = 0; r < lay.rows; ++r) {
        if (static_cast<int>(lines[r].size()) != lay.cols)
            throw ParseError("ragged row (expected width " + std::to_string(lay.cols) + ")", r + 1);
        for (int c = 0; c < lay.cols; ++c) {
            char ch = lines[r][c];
            lay.tiles.push_back(tile_from_char(ch, r + 1));
            if (ch == '1' || ch == '2') {
                int idx = ch - '1';
                if (spawn_seen[idx])
                    throw ValidationError("layout.spawns", std::string("duplicate spawn '") + ch + "'");
                spawn_seen[idx] = true;
                lay.spawns[idx] = {r, c};
            }
        }
    }
    validate(lay, spawn_seen);
    return lay;
}

Layout load_layout_file(const std::filesystem::path& path) {
    return parse_layout(read_text_file(path), path.stem().string());
}

namespace {

// Two mirrored kitchens separated by a counter column holding the two
// shared pots; each side has its own dispensers and serving window.
const std::string kAsymmetricAdvantages =
    "XXXXXXXXX\n"
    "O 1 X 2 O\n"
    "X   P   X\n"
    "D   X   D\n"
    "X   P   X\n"
    "S   X   S\n"
    "XXXXXXXXX\n";

// Single-tile ring corridor around a center counter; tight navigation.
const std::string kCoordinationRing =
    "XXPXX\n"
    "X1 2X\n"
    "D X O\n"
    "X   X\n"
    "XXSXX\n";

// Larger loop around a center counter row that can pass items across.
const std::string kCounterCircuit =
    "XXXPPXXX\n"
    "X1     X\n"
    "D XXXX S\n"
    "X     2X\n"
    "XXXOOXXX\n";

const std::map<std::string, const std::string*>& builtin_texts() {
    static const std::map<std::string, const std::string*> m = {
        {"asymmetric_advantages", &kAsymmetricAdvantages},
        {"coordination_ring", &kCoordinationRing},
        {"counter_circuit", &kCounterCircuit},
    };
    return m;
}

}  // namespace

const std::string& builtin_layout_text(const std::string& name) {
    auto it = builtin_texts().find(name);
    if (it == builtin_texts().end()) throw ConfigError("unknown layout '" + name + "'");
    return *it->second;
}

const Layout& builtin_layout(const std::string& name) {
    static std::map<std::string, Layout> cache;
    auto it = cache.find(name);
    if (it == cache.end())
        it = cache.emplace(name, parse_layout(builtin_layout_text(name), name)).first;
    return it->second;
}

std::vector<std::string> builtin_layout_names() {
    std::vector<std::string> names;
    for (const auto& [k, v] : builtin_texts()) names.push_back(k);
    return names;
}

}  // namespace og::gridworld
