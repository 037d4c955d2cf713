#pragma once

// Lossless grid encoding of a game state as H×W×27 channels.  The schema:
//
//   ch0      player 0 position          ch14     counters (static)
//   ch1      player 1 position          ch15     onion dispensers (static)
//   ch2-5    player 0 facing u/d/l/r    ch16     dish dispensers (static)
//   ch6-9    player 1 facing u/d/l/r    ch17     pots (static)
//   ch10-12  held onion/dish/soup,      ch18     serving windows (static)
//            marked at the holder       ch19     onions in pot (0..3)
//   ch13     soup on counter            ch20     cook timer remaining (0..20)
//            (duplicate of ch24)        ch21     pot done
//                                       ch22-24  counter onion/dish/soup
//                                       ch25     score / 400 (broadcast)
//                                       ch26     t / 400 (broadcast)
//
// Every channel except 19, 20, 25, 26 is a 0/1 mask.  decode_state inverts
// the encoding exactly and rejects grids that could not have come from a
// real state (missing players, non-one-hot orientations, masks disagreeing
// with the layout, ch13 ≠ ch24, ...).

#include <vector>

#include "overgaze/gridworld/layout.hpp"
#include "overgaze/gridworld/types.hpp"

namespace og::features {

inline constexpr int kStateChannels = 27;

struct StateEncoding {
    int rows = 0;
    int cols = 0;
    std::vector<double> grid;  // row-major, index (r*cols + c)*kStateChannels + ch

    double at(int r, int c, int ch) const { return grid[(r * cols + c) * kStateChannels + ch]; }
    double& at(int r, int c, int ch) { return grid[(r * cols + c) * kStateChannels + ch]; }
};

StateEncoding encode_state(const gridworld::GameState& state, const gridworld::Layout& layout);

// Exact inverse of encode_state.  Throws ValidationError on any encoding no
// valid state produces.
gridworld::GameState decode_state(const StateEncoding& enc, const gridworld::Layout& layout);

}  // namespace og::features
