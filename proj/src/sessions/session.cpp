#include "overgaze/sessions/session.hpp"

#include <cmath>
#include <string>

#include "overgaze/common/error.hpp"

namespace og::sessions {

using gridworld::kGazePerStep;
using gridworld::kRoundSteps;
using gridworld::kServeReward;

const std::array<const char*, 5> kSurveyItemNames = {
    "fluency", "role_significance", "trust", "understanding", "cooperativeness"};

int SessionLog::final_score() const {
    int total = 0;
    for (const auto& rec : game) total += rec.reward;
    return total;
}

ViewportMap default_viewport(int rows, int cols) {
    ViewportMap v;
    v.tile_px = 50.0;
    v.rows = rows;
    v.cols = cols;
    v.origin_x = std::floor((1920.0 - cols * v.tile_px) / 2.0);
    v.origin_y = std::floor((1080.0 - rows * v.tile_px) / 2.0);
    return v;
}

void validate_session(const SessionLog& session) {
    if (session.game.size() != static_cast<size_t>(kRoundSteps))
        throw ValidationError("game", "expected " + std::to_string(kRoundSteps) +
                                          " records, got " + std::to_string(session.game.size()));
    for (size_t i = 0; i < session.game.size(); ++i) {
        const GameRecord& rec = session.game[i];
        if (rec.t != static_cast<int>(i))
            throw ValidationError("game[" + std::to_string(i) + "].t", "timesteps not contiguous");
        if (rec.reward != 0 && rec.reward != kServeReward)
            throw ValidationError("game[" + std::to_string(i) + "].reward",
                                  "reward must be 0 or " + std::to_string(kServeReward));
        if (rec.state.t != rec.t)
            throw ValidationError("game[" + std::to_string(i) + "].state.t",
                                  "state timestep disagrees with record");
    }
    int64_t prev_ts = INT64_MIN;
    for (size_t i = 0; i < session.gaze.size(); ++i) {
        const GazeSample& g = session.gaze[i];
        if (g.ts_us <= prev_ts)
            throw ValidationError("gaze[" + std::to_string(i) + "].ts",
                                  "timestamps must be strictly increasing");
        prev_ts = g.ts_us;
        auto finite = [](const std::optional<PixelPoint>& p) {
            return !p || (std::isfinite(p->x) && std::isfinite(p->y));
        };
        if (!finite(g.left) || !finite(g.right))
            throw ValidationError("gaze[" + std::to_string(i) + "]", "non-finite eye coordinates");
    }
    for (size_t i = 0; i < session.survey.answers.size(); ++i) {
        int v = session.survey.answers[i];
        if (v < 0 || v > 6)
            throw ValidationError(std::string("survey.") + kSurveyItemNames[i],
                                  "∉ 0..6 (got " + std::to_string(v) + ")");
    }
}

GazeCoverage validate_gaze_coverage(const SessionLog& session) {
    const int64_t expected = static_cast<int64_t>(kGazePerStep) * kRoundSteps;
    int64_t missing = 0;
    for (const auto& g : session.gaze)
        if (g.both_null()) ++missing;
    // Samples beyond the expected count are kept but the denominator stays
    // fixed; every absent sample (stream shorter than expected) is missing.
    if (static_cast<int64_t>(session.gaze.size()) < expected)
        missing += expected - static_cast<int64_t>(session.gaze.size());
    if (missing > expected) missing = expected;
    GazeCoverage cov;
    cov.missing_fraction = static_cast<double>(missing) / static_cast<double>(expected);
    // ">40% missing" excludes; exactly 40% stays. Integer compare, no FP edge.
    cov.acceptable = missing * 100 <= expected * 40;
    return cov;
}

}  // namespace og::sessions
