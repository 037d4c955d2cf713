#include "overgaze/features/encoding.hpp"

#include <cmath>
#include <string>

#include "overgaze/common/error.hpp"
#include "overgaze/gridworld/step.hpp"

namespace og::features {

using gridworld::Coord;
using gridworld::GameState;
using gridworld::Item;
using gridworld::kCookTime;
using gridworld::kRoundSteps;
using gridworld::kSoupOnions;
using gridworld::Layout;
using gridworld::Orientation;
using gridworld::PotState;
using gridworld::TileKind;

namespace {

constexpr int kHeldBase = 10;  // ch10..12: onion, dish, soup
constexpr int kStaticBase = 14;
constexpr TileKind kStaticKinds[5] = {TileKind::Counter, TileKind::OnionDispenser,
                                      TileKind::DishDispenser, TileKind::Pot,
                                      TileKind::ServingWindow};
constexpr int kCounterBase = 22;  // ch22..24: onion, dish, soup

int held_channel(Item item) {
    switch (item) {
        case Item::Onion: return kHeldBase;
        case Item::Dish: return kHeldBase + 1;
        case Item::Soup: return kHeldBase + 2;
        case Item::None: break;
    }
    return -1;
}

std::string cell(const char* ch, Coord pos) {
    return std::string("encoding.") + ch + "[" + std::to_string(pos.r) + "," +
           std::to_string(pos.c) + "]";
}

// Reads a channel value that must be a small non-negative integer.
int int_value(const StateEncoding& enc, int r, int c, int ch, int max, const char* name) {
    double v = enc.at(r, c, ch);
    double rounded = std::round(v);
    if (!(std::abs(v - rounded) < 1e-6) || rounded < 0 || rounded > max)
        throw ValidationError(cell(name, {r, c}), "not an integer in 0.." + std::to_string(max));
    return static_cast<int>(rounded);
}

bool mask_value(const StateEncoding& enc, int r, int c, int ch, const char* name) {
    double v = enc.at(r, c, ch);
    if (v == 0.0) return false;
    if (v == 1.0) return true;
    throw ValidationError(cell(name, {r, c}), "mask value is neither 0 nor 1");
}

Coord single_position(const StateEncoding& enc, int ch, const char* name) {
    Coord found{-1, -1};
    int count = 0;
    for (int r = 0; r < enc.rows; ++r)
        for (int c = 0; c < enc.cols; ++c)
            if (mask_value(enc, r, c, ch, name)) {
                found = {r, c};
                ++count;
            }
    if (count != 1)
        throw ValidationError(std::string("encoding.") + name,
                              "expected exactly one set cell, found " + std::to_string(count));
    return found;
}

}  // namespace

StateEncoding encode_state(const GameState& state, const Layout& layout) {
    StateEncoding enc;
    enc.rows = layout.rows;
    enc.cols = layout.cols;
    enc.grid.assign(static_cast<size_t>(layout.rows) * layout.cols * kStateChannels, 0.0);

    for (int i = 0; i < 2; ++i) {
        const auto& p = state.players[i];
        enc.at(p.pos.r, p.pos.c, i) = 1.0;
        enc.at(p.pos.r, p.pos.c, 2 + 4 * i + static_cast<int>(p.dir)) = 1.0;
        if (int ch = held_channel(p.held); ch >= 0) enc.at(p.pos.r, p.pos.c, ch) = 1.0;
    }

    for (int r = 0; r < layout.rows; ++r)
        for (int c = 0; c < layout.cols; ++c)
            for (int k = 0; k < 5; ++k)
                if (layout.at({r, c}) == kStaticKinds[k]) enc.at(r, c, kStaticBase + k) = 1.0;

    for (const auto& [pos, pot] : state.pots) {
        enc.at(pos.r, pos.c, 19) = pot.onions;
        enc.at(pos.r, pos.c, 20) = pot.timer > 0 ? pot.timer : 0;
        if (pot.done()) enc.at(pos.r, pos.c, 21) = 1.0;
    }

    for (const auto& [pos, item] : state.counters) {
        enc.at(pos.r, pos.c, kCounterBase + held_channel(item) - kHeldBase) = 1.0;
        if (item == Item::Soup) enc.at(pos.r, pos.c, 13) = 1.0;
    }

    const double score_plane = static_cast<double>(state.score) / kRoundSteps;
    const double time_plane = static_cast<double>(state.t) / kRoundSteps;
    for (int r = 0; r < layout.rows; ++r)
        for (int c = 0; c < layout.cols; ++c) {
            enc.at(r, c, 25) = score_plane;
            enc.at(r, c, 26) = time_plane;
        }
    return enc;
}

GameState decode_state(const StateEncoding& enc, const Layout& layout) {
    if (enc.rows != layout.rows || enc.cols != layout.cols ||
        enc.grid.size() != static_cast<size_t>(enc.rows) * enc.cols * kStateChannels)
        throw ValidationError("encoding", "grid dimensions do not match the layout");
    for (double v : enc.grid)
        if (!std::isfinite(v)) throw ValidationError("encoding", "non-finite channel value");

    GameState state;
    state.players[0].pos = single_position(enc, 0, "ch0");
    state.players[1].pos = single_position(enc, 1, "ch1");

    for (int i = 0; i < 2; ++i) {
        auto& p = state.players[i];
        const char* name = i == 0 ? "ch2-5" : "ch6-9";
        int dir = -1;
        for (int d = 0; d < 4; ++d) {
            int ch = 2 + 4 * i + d;
            for (int r = 0; r < enc.rows; ++r)
                for (int c = 0; c < enc.cols; ++c)
                    if (mask_value(enc, r, c, ch, name)) {
                        if (Coord{r, c} != p.pos || dir >= 0)
                            throw ValidationError(cell(name, {r, c}),
                                                  "orientation is not one-hot at the player tile");
                        dir = d;
                    }
        }
        if (dir < 0)
            throw ValidationError(std::string("encoding.") + name, "player has no orientation");
        p.dir = static_cast<Orientation>(dir);
    }

    for (int r = 0; r < enc.rows; ++r)
        for (int c = 0; c < enc.cols; ++c)
            for (int h = 0; h < 3; ++h)
                if (mask_value(enc, r, c, kHeldBase + h, "ch10-12")) {
                    Coord pos{r, c};
                    int who = pos == state.players[0].pos   ? 0
                              : pos == state.players[1].pos ? 1
                                                            : -1;
                    if (who < 0)
                        throw ValidationError(cell("ch10-12", pos),
                                              "held-item mark away from any player");
                    auto& held = state.players[who].held;
                    if (held != Item::None)
                        throw ValidationError(cell("ch10-12", pos), "player holds two items");
                    held = static_cast<Item>(h + 1);  // Onion, Dish, Soup
                }

    for (int r = 0; r < enc.rows; ++r)
        for (int c = 0; c < enc.cols; ++c)
            for (int k = 0; k < 5; ++k) {
                bool want = layout.at({r, c}) == kStaticKinds[k];
                if (mask_value(enc, r, c, kStaticBase + k, "ch14-18") != want)
                    throw ValidationError(cell("ch14-18", {r, c}),
                                          "static mask disagrees with the layout");
            }

    for (int r = 0; r < enc.rows; ++r)
        for (int c = 0; c < enc.cols; ++c) {
            Coord pos{r, c};
            int onions = int_value(enc, r, c, 19, kSoupOnions, "ch19");
            int timer = int_value(enc, r, c, 20, kCookTime, "ch20");
            bool done = mask_value(enc, r, c, 21, "ch21");
            if (onions == 0 && timer == 0 && !done) continue;
            if (layout.at(pos) != TileKind::Pot)
                throw ValidationError(cell("ch19-21", pos), "pot channels set off a pot tile");
            PotState pot;
            pot.onions = onions;
            if (onions < kSoupOnions) {
                if (timer != 0 || done)
                    throw ValidationError(cell("ch19-21", pos), "timer on a partially filled pot");
                pot.timer = -1;
            } else if (done) {
                if (timer != 0)
                    throw ValidationError(cell("ch19-21", pos), "done pot with time remaining");
                pot.timer = 0;
            } else {
                if (timer == 0)
                    throw ValidationError(cell("ch19-21", pos), "full pot neither cooking nor done");
                pot.timer = timer;
            }
            state.pots[pos] = pot;
        }

    for (int r = 0; r < enc.rows; ++r)
        for (int c = 0; c < enc.cols; ++c) {
            Coord pos{r, c};
            Item item = Item::None;
            for (int h = 0; h < 3; ++h)
                if (mask_value(enc, r, c, kCounterBase + h, "ch22-24")) {
                    if (item != Item::None)
                        throw ValidationError(cell("ch22-24", pos), "two items on one counter");
                    item = static_cast<Item>(h + 1);
                }
            if (mask_value(enc, r, c, 13, "ch13") != (item == Item::Soup))
                throw ValidationError(cell("ch13", pos),
                                      "soup-on-counter mask disagrees with ch24");
            if (item == Item::None) continue;
            if (layout.at(pos) != TileKind::Counter)
                throw ValidationError(cell("ch22-24", pos), "loose item off a counter tile");
            state.counters[pos] = item;
        }

    const double score_plane = enc.at(0, 0, 25);
    const double time_plane = enc.at(0, 0, 26);
    for (int r = 0; r < enc.rows; ++r)
        for (int c = 0; c < enc.cols; ++c)
            if (enc.at(r, c, 25) != score_plane || enc.at(r, c, 26) != time_plane)
                throw ValidationError(cell("ch25-26", {r, c}), "broadcast plane is not uniform");
    state.score = static_cast<int>(std::llround(score_plane * kRoundSteps));
    state.t = static_cast<int>(std::llround(time_plane * kRoundSteps));
    if (state.score < 0) throw ValidationError("encoding.ch25", "negative score");

    check_state(state, layout);
    return state;
}

}  // namespace og::features
