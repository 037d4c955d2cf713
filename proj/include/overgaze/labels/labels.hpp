#pragma once

// The three prediction targets.  Trust is the post-round survey's trust item
// (7-point Likert, one label per round).  Proficiency bins final scores into
// tertiles within an agent-layout group, ties taking the lower bin.  Intent
// back-labels every timestep with the human proxy's next completed subtask;
// timesteps after the final completion carry no label (-1) and are masked
// out of loss and metrics.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "overgaze/features/representation.hpp"
#include "overgaze/gridworld/types.hpp"
#include "overgaze/sessions/session.hpp"

namespace og::labels {

// The trust survey item, 0 (strongly disagree) .. 6 (strongly agree).
// Throws ValidationError when the survey was not administered.
int trust_label(const sessions::SessionLog& session);

// Score at round end.  Game records carry the pre-action state, so the
// last step's reward still has to land on top of the last recorded score.
int final_score(const sessions::SessionLog& session);

// Tertile bins for one agent-layout group, keyed like the input: 0 beginner,
// 1 intermediate, 2 expert.  Scores tied across a tertile cutoff all take
// the lower bin, so the assignment is order-independent and monotone.
// Throws ValidationError when the group has fewer than three sessions.
std::map<std::string, int> proficiency_bins(
    const std::vector<std::pair<std::string, int>>& scores, const std::string& group);

// Every subtask the human proxy completed: interacts that changed the state,
// classified from the before/after delta.  No-op interacts emit nothing.
std::vector<std::pair<int, gridworld::Subtask>> detect_subtasks(
    const sessions::SessionLog& session);

// Next-subtask label per timestep for the full round; -1 after the final
// completion (masked).  The completion timestep itself carries the completed
// subtask (boundary inclusive).
std::vector<int> full_intent_labels(const sessions::SessionLog& session);

// The same labels sliced to a window.
std::vector<int> intent_labels(const sessions::SessionLog& session,
                               const features::WindowSpec& window);

// Per-session label sidecar: {trust, proficiency, intents: [{t, id}...],
// masked_after}.  `proficiency` comes from the session's group binning.
std::string label_sidecar(const sessions::SessionLog& session, int proficiency);

}  // namespace og::labels
