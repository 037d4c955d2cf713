#pragma once

// The five model-input representations over a timestep window:
//
//   game           [T, H, W, 27]  lossless state encoding per timestep
//   gaze           [T, H, W]      gaze heatmap per timestep
//   game_plus_gaze [T, H, W, 28]  channel-wise concatenation of the two
//   collapsed_gaze [H, W]         mean heatmap over the window
//   gaze_object    [3]            mean own/teammate/environment ratios
//
// The first three feed the sequence model; the last two are the temporally
// collapsed inputs for the MLP.

#include <string>
#include <vector>

#include "overgaze/sessions/session.hpp"

namespace og::features {

enum class ReprKind { Game, Gaze, GamePlusGaze, CollapsedGaze, GazeObject };
inline constexpr int kNumReprKinds = 5;

std::string repr_kind_name(ReprKind kind);
ReprKind repr_kind_from_name(const std::string& name);

// True for the per-timestep (sequence) kinds, false for the collapsed ones.
bool repr_is_sequence(ReprKind kind);

struct WindowSpec {
    int start_t = 0;
    int length = 20;
};

struct Representation {
    ReprKind kind = ReprKind::Game;
    std::vector<int> shape;    // dimensions, outermost first
    std::vector<double> data;  // row-major

    size_t size() const { return data.size(); }
};

// Throws ValidationError if the window does not fit in the session.
void check_window(const WindowSpec& window, size_t round_steps);

Representation build_representation(const sessions::SessionLog& session, const WindowSpec& window,
                                    ReprKind kind, const sessions::ViewportMap& viewport);

}  // namespace og::features
