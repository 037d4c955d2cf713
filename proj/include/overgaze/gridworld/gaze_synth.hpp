#pragma once

// Synthetic eye-tracking: for every gameplay timestep we emit kGazePerStep
// samples (~300 Hz against the 5 FPS game clock).  Each sample targets a
// tile drawn from a fixation mixture over the proxy's own agent, the AI
// teammate, the current goal tile, and uniform noise; the tile center is
// converted to screen pixels and jittered.  During the first
// `saccade_latency` timesteps of a round the target is pinned to the
// teammate — players glance at the partner first, then settle into their
// own play.  Coordinates live on a millipixel grid so they survive
// serialization exactly.

#include <vector>

#include "overgaze/common/rng.hpp"
#include "overgaze/gridworld/types.hpp"
#include "overgaze/sessions/session.hpp"

namespace og::gridworld {

struct GazeProfile {
    // Fixation mixture (must sum to 1): own agent, teammate, current goal
    // tile, uniform noise over the grid.
    double w_own = 0.35;
    double w_teammate = 0.12;
    double w_goal = 0.30;
    double w_noise = 0.23;
    int saccade_latency = 9;     // round-start timesteps spent on the teammate
    double jitter_px = 9.0;      // fixation scatter (std dev, pixels)
    double eye_jitter_px = 1.0;  // extra per-eye scatter (std dev, pixels)
    double dropout_rate = 0.05;  // per-eye loss probability
    double pupil_mean_mm = 3.5;
    double pupil_sd_mm = 0.2;
};

// Skill-conditioned profile: skilled players fixate the goal more at the
// expense of idle scanning, track more steadily (lower jitter), and break
// away from the teammate sooner at round start.  The own/teammate shares
// stay fixed, so where the eyes land — not how often each object is looked
// at — carries the skill signal.
GazeProfile profile_for_skill(double skill);

// Samples for one gameplay timestep.  `own`, `teammate`, and `goal` are grid
// tiles; `t` is the timestep index and anchors both the timestamps and the
// round-start saccade window.  Always emits exactly kGazePerStep samples; an
// unlucky double dropout leaves both eyes null but keeps the timestamp.
std::vector<sessions::GazeSample> synthesize_step_gaze(const sessions::ViewportMap& viewport,
                                                       int t, Coord own, Coord teammate,
                                                       Coord goal, const GazeProfile& profile,
                                                       Rng& rng);

}  // namespace og::gridworld
