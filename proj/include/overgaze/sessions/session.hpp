#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "overgaze/gridworld/types.hpp"

namespace og::sessions {

struct PixelPoint {
    double x = 0.0;
    double y = 0.0;
    bool operator==(const PixelPoint&) const = default;
};

// One ~300 Hz eye-tracker record. Timestamps are integer microseconds so
// serialization (seconds with six decimals) round-trips exactly.
struct GazeSample {
    int64_t ts_us = 0;
    std::optional<PixelPoint> left;
    std::optional<PixelPoint> right;
    std::optional<double> pupil_mm;
    bool operator==(const GazeSample&) const = default;

    bool both_null() const { return !left && !right; }
    double ts_seconds() const { return static_cast<double>(ts_us) * 1e-6; }
};

struct GameRecord {
    int t = 0;
    int64_t ts_us = 0;
    gridworld::GameState state;  // state the actions were taken in
    std::array<gridworld::Action, 2> actions{gridworld::Action::Stay, gridworld::Action::Stay};
    int reward = 0;
    std::vector<gridworld::InteractEvent> events;
    bool operator==(const GameRecord&) const = default;
};

// Likert answers 0..6 in the fixed statement order; trust is item 2.
struct Survey {
    std::array<int, 5> answers{-1, -1, -1, -1, -1};  // -1 = not administered
    bool operator==(const Survey&) const = default;
    bool present() const { return answers[0] >= 0; }
    int trust() const { return answers[2]; }
};
inline constexpr int kTrustItem = 2;
extern const std::array<const char*, 5> kSurveyItemNames;

struct SessionMeta {
    std::string participant_id;
    int trial_id = 0;
    std::string layout;
    std::string agent;  // teammate policy kind
    uint64_t seed = 0;
    bool operator==(const SessionMeta&) const = default;
};

struct SessionLog {
    SessionMeta meta;
    std::vector<GameRecord> game;  // exactly kRoundSteps records
    std::vector<GazeSample> gaze;  // ts strictly increasing
    Survey survey;
    bool operator==(const SessionLog&) const = default;

    int final_score() const;
};

// Grid-to-screen mapping used both to place synthetic gaze and to map
// recorded pixels back onto tiles.
struct ViewportMap {
    double origin_x = 0.0;  // top-left pixel of tile (0,0)
    double origin_y = 0.0;
    double tile_px = 50.0;
    int rows = 0;
    int cols = 0;
};

// Deterministic default: 50 px tiles centered on a 1920x1080 display.
ViewportMap default_viewport(int rows, int cols);

// Throws ValidationError naming the offending field.
void validate_session(const SessionLog& session);

struct GazeCoverage {
    double missing_fraction = 0.0;
    bool acceptable = true;
};

// Fraction of both-eyes-null samples over the fixed expected count of
// 60 x 400 = 24000; surplus samples never lower the fraction. A session is
// acceptable when at most 40% is missing (the exclusion rule drops >40%).
GazeCoverage validate_gaze_coverage(const SessionLog& session);

}  // namespace og::sessions
