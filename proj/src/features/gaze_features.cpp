#include "overgaze/features/gaze_features.hpp"

#include <cmath>

#include "overgaze/gridworld/types.hpp"

namespace og::features {

using gridworld::Coord;
using sessions::GazeSample;
using sessions::PixelPoint;
using sessions::SessionLog;
using sessions::ViewportMap;

std::optional<Coord> preprocess_gaze(const GazeSample& sample, const ViewportMap& viewport) {
    PixelPoint p;
    if (sample.left && sample.right) {
        p = {(sample.left->x + sample.right->x) / 2.0, (sample.left->y + sample.right->y) / 2.0};
    } else if (sample.left) {
        p = *sample.left;
    } else if (sample.right) {
        p = *sample.right;
    } else {
        return std::nullopt;
    }
    double x = p.x - viewport.origin_x;
    double y = p.y - viewport.origin_y;
    if (x < 0 || y < 0 || x >= viewport.cols * viewport.tile_px ||
        y >= viewport.rows * viewport.tile_px)
        return std::nullopt;
    return Coord{static_cast<int>(std::floor(y / viewport.tile_px)),
                 static_cast<int>(std::floor(x / viewport.tile_px))};
}

GazeHeatmap gaze_heatmap(std::span<const GazeSample> samples, const ViewportMap& viewport,
                         int rows, int cols) {
    GazeHeatmap map;
    map.rows = rows;
    map.cols = cols;
    map.grid.assign(static_cast<size_t>(rows) * cols, 0.0);

    int valid = 0;
    for (const GazeSample& s : samples) {
        if (auto tile = preprocess_gaze(s, viewport); tile) {
            map.at(tile->r, tile->c) += 1.0;
            ++valid;
        }
    }
    if (valid > 0)
        for (double& v : map.grid) v /= valid;
    return map;
}

std::array<double, 3> gaze_object_ratios(std::span<const GazeSample> samples,
                                         const gridworld::GameState& state,
                                         const ViewportMap& viewport) {
    std::array<int, 3> counts{0, 0, 0};
    int valid = 0;
    for (const GazeSample& s : samples) {
        auto tile = preprocess_gaze(s, viewport);
        if (!tile) continue;
        ++valid;
        if (*tile == state.players[0].pos)
            ++counts[0];
        else if (*tile == state.players[1].pos)
            ++counts[1];
        else
            ++counts[2];
    }
    if (valid == 0) return {0.0, 0.0, 0.0};
    return {static_cast<double>(counts[0]) / valid, static_cast<double>(counts[1]) / valid,
            static_cast<double>(counts[2]) / valid};
}

std::vector<std::pair<size_t, size_t>> gaze_slices(const SessionLog& session) {
    std::vector<std::pair<size_t, size_t>> slices(session.game.size());
    size_t k = 0;
    for (size_t t = 0; t < session.game.size(); ++t) {
        int64_t upper = t + 1 < session.game.size()
                            ? session.game[t + 1].ts_us
                            : static_cast<int64_t>(session.game.size()) * gridworld::kStepMicros;
        while (k < session.gaze.size() && session.gaze[k].ts_us < session.game[t].ts_us) ++k;
        size_t begin = k;
        while (k < session.gaze.size() && session.gaze[k].ts_us < upper) ++k;
        slices[t] = {begin, k};
    }
    // Round-end samples land in the final timestep ("closed on the right").
    if (!slices.empty() && k < session.gaze.size()) {
        int64_t round_end = static_cast<int64_t>(session.game.size()) * gridworld::kStepMicros;
        while (k < session.gaze.size() && session.gaze[k].ts_us <= round_end) ++k;
        slices.back().second = k;
    }
    return slices;
}

}  // namespace og::features
