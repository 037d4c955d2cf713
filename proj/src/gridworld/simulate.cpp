#include "overgaze/gridworld/simulate.hpp"

#include <cmath>

#include "overgaze/gridworld/gaze_synth.hpp"
#include "overgaze/gridworld/layout.hpp"
#include "overgaze/gridworld/step.hpp"

namespace og::gridworld {

using sessions::GameRecord;
using sessions::SessionLog;

namespace {

// Likert response: map a latent score through a sigmoid onto 0..6, so a
// latent of zero lands on the neutral midpoint 3.
int likert(double latent) {
    double p = 1.0 / (1.0 + std::exp(-latent));
    int v = static_cast<int>(std::lround(6.0 * p));
    return std::clamp(v, 0, 6);
}

}  // namespace

SessionLog simulate_session(const SimConfig& config) {
    const Layout& layout = builtin_layout(config.layout);
    const sessions::ViewportMap viewport = sessions::default_viewport(layout.rows, layout.cols);

    Rng proxy_rng(derive_seed(config.seed, "proxy"));
    Rng agent_rng(derive_seed(config.seed, "agent"));
    Rng gaze_rng(derive_seed(config.seed, "gaze"));
    Rng survey_rng(derive_seed(config.seed, "survey"));

    const PolicyConfig proxy_policy{PolicyKind::Adaptive, config.skill};
    const PolicyConfig agent_policy{config.agent, 1.0};
    const GazeProfile profile = profile_for_skill(config.skill);

    SessionLog log;
    log.meta.participant_id = config.participant_id;
    log.meta.trial_id = config.trial_id;
    log.meta.layout = layout.name;
    log.meta.agent = policy_kind_name(config.agent);
    log.meta.seed = config.seed;

    GameState state = initial_state(layout);
    int collisions = 0;
    for (int t = 0; t < kRoundSteps; ++t) {
        Decision d0 = decide(proxy_policy, state, layout, 0, proxy_rng);
        Decision d1 = decide(agent_policy, state, layout, 1, agent_rng);

        auto gaze = synthesize_step_gaze(viewport, t, state.players[0].pos, state.players[1].pos,
                                         d0.goal_tile, profile, gaze_rng);
        log.gaze.insert(log.gaze.end(), gaze.begin(), gaze.end());

        GameRecord rec;
        rec.t = t;
        rec.ts_us = static_cast<int64_t>(t) * kStepMicros;
        rec.state = state;
        rec.actions = {d0.action, d1.action};

        StepResult result = step(state, layout, {d0.action, d1.action});
        rec.reward = result.reward;
        rec.events = result.events;
        log.game.push_back(std::move(rec));

        if (result.collision) ++collisions;
        state = std::move(result.state);
    }

    const double z = (state.score - 60.0) / 50.0;       // outcome, roughly centered
    const double c = (collisions - 25.0) / 20.0;        // friction, roughly centered
    auto noise = [&](double sd) { return survey_rng.normal() * sd; };
    log.survey.answers[0] = likert(1.0 * z - 0.4 * c + noise(0.6));  // fluency
    log.survey.answers[1] = likert(0.5 * z + noise(0.8));            // role significance
    log.survey.answers[2] = likert(1.3 * z - 0.6 * c + noise(0.5));  // trust
    log.survey.answers[3] = likert(0.8 * z + noise(0.7));            // understanding
    log.survey.answers[4] = likert(0.9 * z - 0.5 * c + noise(0.6));  // cooperativeness
    return log;
}

}  // namespace og::gridworld
