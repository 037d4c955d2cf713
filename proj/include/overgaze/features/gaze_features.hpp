#pragma once

// Gaze preprocessing: binocular averaging (or the single reporting eye),
// screen-to-tile mapping, per-timestep heatmaps, and the spatially collapsed
// own/teammate/environment ratios.  A sample is "valid" when at least one
// eye reports and the resulting pixel lands inside the grid.

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "overgaze/gridworld/types.hpp"
#include "overgaze/sessions/session.hpp"

namespace og::features {

struct GazeHeatmap {
    int rows = 0;
    int cols = 0;
    std::vector<double> grid;  // row-major, index r*cols + c

    double at(int r, int c) const { return grid[r * cols + c]; }
    double& at(int r, int c) { return grid[r * cols + c]; }
};

// Screen pixel → grid tile.  Averages both eyes when both report, uses the
// single reporting eye otherwise, and returns nullopt when no eye reports or
// the pixel falls outside the grid.
std::optional<gridworld::Coord> preprocess_gaze(const sessions::GazeSample& sample,
                                                const sessions::ViewportMap& viewport);

// Fraction of valid samples landing on each tile; all zeros when no sample
// is valid.  Out-of-bounds samples are excluded from the denominator, so a
// nonzero heatmap always sums to 1.
GazeHeatmap gaze_heatmap(std::span<const sessions::GazeSample> samples,
                         const sessions::ViewportMap& viewport, int rows, int cols);

// Ratios of valid samples on the human proxy's tile, the teammate's tile,
// and everywhere else, against the timestep's recorded (start-of-timestep)
// state.  (0,0,0) when no sample is valid.
std::array<double, 3> gaze_object_ratios(std::span<const sessions::GazeSample> samples,
                                         const gridworld::GameState& state,
                                         const sessions::ViewportMap& viewport);

// Index ranges into session.gaze, one [begin, end) per game timestep: sample
// k belongs to timestep t iff game[t].ts ≤ gaze[k].ts < game[t+1].ts, the
// last timestep closed on the right by the round end.
std::vector<std::pair<size_t, size_t>> gaze_slices(const sessions::SessionLog& session);

}  // namespace og::features
