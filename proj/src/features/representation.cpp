#include "overgaze/features/representation.hpp"

#include <span>

#include "overgaze/common/error.hpp"
#include "overgaze/features/encoding.hpp"
#include "overgaze/features/gaze_features.hpp"
#include "overgaze/gridworld/layout.hpp"

namespace og::features {

using gridworld::Layout;
using sessions::GazeSample;
using sessions::SessionLog;
using sessions::ViewportMap;

std::string repr_kind_name(ReprKind kind) {
    switch (kind) {
        case ReprKind::Game: return "game";
        case ReprKind::Gaze: return "gaze";
        case ReprKind::GamePlusGaze: return "game_plus_gaze";
        case ReprKind::CollapsedGaze: return "collapsed_gaze";
        case ReprKind::GazeObject: return "gaze_object";
    }
    throw Error("unreachable representation kind");
}

ReprKind repr_kind_from_name(const std::string& name) {
    for (int k = 0; k < kNumReprKinds; ++k)
        if (repr_kind_name(static_cast<ReprKind>(k)) == name) return static_cast<ReprKind>(k);
    throw ValidationError("representation", "unknown kind '" + name + "'");
}

bool repr_is_sequence(ReprKind kind) {
    return kind == ReprKind::Game || kind == ReprKind::Gaze || kind == ReprKind::GamePlusGaze;
}

void check_window(const WindowSpec& window, size_t round_steps) {
    if (window.start_t < 0 || window.length < 1 ||
        static_cast<size_t>(window.start_t) + window.length > round_steps)
        throw ValidationError("window", "start " + std::to_string(window.start_t) + " length " +
                                            std::to_string(window.length) +
                                            " does not fit in " + std::to_string(round_steps) +
                                            " timesteps");
}

Representation build_representation(const SessionLog& session, const WindowSpec& window,
                                    ReprKind kind, const ViewportMap& viewport) {
    check_window(window, session.game.size());
    const Layout& layout = gridworld::builtin_layout(session.meta.layout);
    const int rows = layout.rows, cols = layout.cols;
    const size_t cells = static_cast<size_t>(rows) * cols;
    const auto slices = gaze_slices(session);

    auto step_samples = [&](int t) {
        auto [begin, end] = slices[t];
        return std::span<const GazeSample>(session.gaze.data() + begin, end - begin);
    };

    Representation rep;
    rep.kind = kind;
    switch (kind) {
        case ReprKind::Game: {
            rep.shape = {window.length, rows, cols, kStateChannels};
            rep.data.reserve(window.length * cells * kStateChannels);
            for (int t = window.start_t; t < window.start_t + window.length; ++t) {
                StateEncoding enc = encode_state(session.game[t].state, layout);
                rep.data.insert(rep.data.end(), enc.grid.begin(), enc.grid.end());
            }
            break;
        }
        case ReprKind::Gaze: {
            rep.shape = {window.length, rows, cols};
            rep.data.reserve(window.length * cells);
            for (int t = window.start_t; t < window.start_t + window.length; ++t) {
                GazeHeatmap map = gaze_heatmap(step_samples(t), viewport, rows, cols);
                rep.data.insert(rep.data.end(), map.grid.begin(), map.grid.end());
            }
            break;
        }
        case ReprKind::GamePlusGaze: {
            rep.shape = {window.length, rows, cols, kStateChannels + 1};
            rep.data.resize(static_cast<size_t>(window.length) * cells * (kStateChannels + 1));
            size_t out = 0;
            for (int t = window.start_t; t < window.start_t + window.length; ++t) {
                StateEncoding enc = encode_state(session.game[t].state, layout);
                GazeHeatmap map = gaze_heatmap(step_samples(t), viewport, rows, cols);
                for (size_t cell = 0; cell < cells; ++cell) {
                    for (int ch = 0; ch < kStateChannels; ++ch)
                        rep.data[out++] = enc.grid[cell * kStateChannels + ch];
                    rep.data[out++] = map.grid[cell];
                }
            }
            break;
        }
        case ReprKind::CollapsedGaze: {
            rep.shape = {rows, cols};
            rep.data.assign(cells, 0.0);
            for (int t = window.start_t; t < window.start_t + window.length; ++t) {
                GazeHeatmap map = gaze_heatmap(step_samples(t), viewport, rows, cols);
                for (size_t cell = 0; cell < cells; ++cell) rep.data[cell] += map.grid[cell];
            }
            for (double& v : rep.data) v /= window.length;
            break;
        }
        case ReprKind::GazeObject: {
            rep.shape = {3};
            rep.data.assign(3, 0.0);
            int populated = 0;
            for (int t = window.start_t; t < window.start_t + window.length; ++t) {
                auto ratios =
                    gaze_object_ratios(step_samples(t), session.game[t].state, viewport);
                if (ratios[0] + ratios[1] + ratios[2] == 0.0) continue;
                for (int i = 0; i < 3; ++i) rep.data[i] += ratios[i];
                ++populated;
            }
            if (populated > 0)
                for (double& v : rep.data) v /= populated;
            break;
        }
    }
    return rep;
}

}  // namespace og::features
