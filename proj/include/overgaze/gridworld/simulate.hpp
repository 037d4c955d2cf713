#pragma once

// End-to-end session synthesis: a human proxy (planner with skill-dependent
// action noise) and a scripted AI teammate play one round while the gaze
// synthesizer watches the proxy's focus of attention.  Post-round survey
// answers are generated from round outcomes, so trust tracks how well the
// team actually did.

#include <string>

#include "overgaze/gridworld/policy.hpp"
#include "overgaze/sessions/session.hpp"

namespace og::gridworld {

struct SimConfig {
    std::string layout = "coordination_ring";
    PolicyKind agent = PolicyKind::Adaptive;  // AI teammate (player 1)
    double skill = 0.5;                       // proxy quality in [0, 1] (player 0)
    std::string participant_id = "p000";
    int trial_id = 0;
    uint64_t seed = 0;  // session seed; per-concern streams are derived from it
};

// Plays a full round (kRoundSteps timesteps) and returns the complete log:
// header metadata, per-step game records, the gaze stream, and the survey.
sessions::SessionLog simulate_session(const SimConfig& config);

}  // namespace og::gridworld
