#include "overgaze/gridworld/gaze_synth.hpp"

#include <cmath>

namespace og::gridworld {

using sessions::GazeSample;
using sessions::PixelPoint;
using sessions::ViewportMap;

namespace {

double quantize_millipixel(double v) { return std::round(v * 1000.0) / 1000.0; }

PixelPoint tile_center(const ViewportMap& vp, Coord tile) {
    return {vp.origin_x + (tile.c + 0.5) * vp.tile_px, vp.origin_y + (tile.r + 0.5) * vp.tile_px};
}

}  // namespace

GazeProfile profile_for_skill(double skill) {
    GazeProfile p;
    p.w_own = 0.35;
    p.w_teammate = 0.12;
    p.w_goal = 0.08 + 0.45 * skill;
    p.w_noise = 1.0 - p.w_own - p.w_teammate - p.w_goal;
    p.saccade_latency = static_cast<int>(std::lround(15.0 - 12.0 * skill));
    p.jitter_px = 12.0 - 6.0 * skill;
    return p;
}

std::vector<GazeSample> synthesize_step_gaze(const ViewportMap& vp, int t, Coord own,
                                             Coord teammate, Coord goal,
                                             const GazeProfile& profile, Rng& rng) {
    std::vector<GazeSample> out;
    out.reserve(kGazePerStep);
    const int64_t step_start_us = static_cast<int64_t>(t) * kStepMicros;

    for (int k = 0; k < kGazePerStep; ++k) {
        GazeSample sample;
        sample.ts_us = step_start_us + static_cast<int64_t>(k) * kStepMicros / kGazePerStep;

        bool drop_left = rng.uniform() < profile.dropout_rate;
        bool drop_right = rng.uniform() < profile.dropout_rate;
        if (drop_left && drop_right) {
            out.push_back(sample);  // tracker lost both eyes; timestamp only
            continue;
        }

        Coord target;
        if (t < profile.saccade_latency) {
            target = teammate;
        } else {
            double u = rng.uniform();
            if (u < profile.w_own) {
                target = own;
            } else if (u < profile.w_own + profile.w_teammate) {
                target = teammate;
            } else if (u < profile.w_own + profile.w_teammate + profile.w_goal) {
                target = goal;
            } else {
                target = {rng.uniform_int(vp.rows), rng.uniform_int(vp.cols)};
            }
        }
        PixelPoint focus = tile_center(vp, target);
        focus.x += rng.normal() * profile.jitter_px;
        focus.y += rng.normal() * profile.jitter_px;

        if (!drop_left)
            sample.left = PixelPoint{
                quantize_millipixel(focus.x + rng.normal() * profile.eye_jitter_px),
                quantize_millipixel(focus.y + rng.normal() * profile.eye_jitter_px)};
        if (!drop_right)
            sample.right = PixelPoint{
                quantize_millipixel(focus.x + rng.normal() * profile.eye_jitter_px),
                quantize_millipixel(focus.y + rng.normal() * profile.eye_jitter_px)};
        sample.pupil_mm =
            quantize_millipixel(profile.pupil_mean_mm + rng.normal() * profile.pupil_sd_mm);
        out.push_back(sample);
    }
    return out;
}

}  // namespace og::gridworld
