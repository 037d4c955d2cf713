#pragma once

// Model-ready examples: one per session-window, carrying the flattened
// representation, per-position labels, and the loss mask.  Sequence kinds
// flatten to [window_length, features]; collapsed kinds to [1, features]
// with a single label (intent uses the window-final label there, so the
// aggregated baselines answer the same question as the sequence models at
// the final position).

#include <filesystem>
#include <string>
#include <vector>

#include "overgaze/features/archive.hpp"
#include "overgaze/features/representation.hpp"
#include "overgaze/labels/labels.hpp"
#include "overgaze/neural/mat.hpp"
#include "overgaze/sessions/session.hpp"

namespace og::experiments {

enum class Task { Trust, Proficiency, Intent };

std::string task_name(Task task);
Task task_from_name(const std::string& name);
int task_classes(Task task);  // trust 7, proficiency 3, intent 11

struct Example {
    std::string participant_id;
    int trial_id = 0;
    neural::Mat<float> inputs;         // [positions, features]
    std::vector<int> labels;           // one per position; -1 where masked
    std::vector<unsigned char> mask;   // 1 = contributes to loss/metrics
};

struct Dataset {
    std::vector<Example> examples;
    int n_classes = 0;
    int input_dim = 0;
    int positions = 0;  // window length for sequence kinds, 1 for collapsed
    bool sequence = false;
};

// In-memory path: straight from a session (proficiency supplied by the
// caller's group binning).
Example make_example(const sessions::SessionLog& session, features::ReprKind kind,
                     const features::WindowSpec& window, Task task, int proficiency,
                     const sessions::ViewportMap& viewport);

// On-disk path: from a featurize archive pair (base.ogt + base.json).
Example example_from_feature(const features::Feature& feature, Task task);

// Collects every archive of the requested kind/window/group under `dir`
// (featurize layout: <dir>/<kind>/*.ogt).  Empty agent/layout match all.
Dataset load_dataset(const std::filesystem::path& dir, features::ReprKind kind,
                     const features::WindowSpec& window, Task task, const std::string& agent,
                     const std::string& layout);

Dataset assemble_dataset(std::vector<Example> examples, features::ReprKind kind,
                         const features::WindowSpec& window, Task task);

}  // namespace og::experiments
