#include "overgaze/experiments/dataset.hpp"

#include <algorithm>

#include "overgaze/common/error.hpp"
#include "overgaze/common/io.hpp"

namespace og::experiments {

using features::Feature;
using features::ReprKind;
using features::WindowSpec;
using neural::Mat;
using sessions::SessionLog;

std::string task_name(Task task) {
    switch (task) {
        case Task::Trust: return "trust";
        case Task::Proficiency: return "proficiency";
        case Task::Intent: return "intent";
    }
    throw Error("unreachable task");
}

Task task_from_name(const std::string& name) {
    if (name == "trust") return Task::Trust;
    if (name == "proficiency") return Task::Proficiency;
    if (name == "intent") return Task::Intent;
    throw ValidationError("task", "unknown task '" + name + "'");
}

int task_classes(Task task) {
    switch (task) {
        case Task::Trust: return 7;
        case Task::Proficiency: return 3;
        case Task::Intent: return gridworld::kNumSubtasks;
    }
    throw Error("unreachable task");
}

namespace {

// Labels and mask for a window already reduced to `positions` rows.
void fill_labels(Example& ex, Task task, const SessionLog& session, const WindowSpec& window,
                 int proficiency, int positions) {
    switch (task) {
        case Task::Trust: {
            int label = labels::trust_label(session);
            ex.labels.assign(positions, label);
            ex.mask.assign(positions, 1);
            return;
        }
        case Task::Proficiency: {
            if (proficiency < 0 || proficiency > 2)
                throw ValidationError("example.proficiency", "label missing for session");
            ex.labels.assign(positions, proficiency);
            ex.mask.assign(positions, 1);
            return;
        }
        case Task::Intent: {
            std::vector<int> window_labels = labels::intent_labels(session, window);
            if (positions == 1) {
                // Aggregated input answers for the final window position.
                ex.labels.assign(1, window_labels.back());
            } else {
                ex.labels = std::move(window_labels);
            }
            ex.mask.resize(ex.labels.size());
            for (size_t i = 0; i < ex.labels.size(); ++i) ex.mask[i] = ex.labels[i] >= 0;
            return;
        }
    }
    throw Error("unreachable task");
}

Mat<float> to_inputs(const std::vector<int>& shape, const std::vector<double>& data,
                     bool sequence) {
    int positions = sequence ? shape.at(0) : 1;
    size_t features = 1;
    for (size_t i = sequence ? 1 : 0; i < shape.size(); ++i)
        features *= static_cast<size_t>(shape[i]);
    Mat<float> m(positions, static_cast<int>(features));
    for (size_t i = 0; i < data.size(); ++i) m.v[i] = static_cast<float>(data[i]);
    return m;
}

Mat<float> to_inputs(const std::vector<int>& shape, const std::vector<float>& data,
                     bool sequence) {
    int positions = sequence ? shape.at(0) : 1;
    size_t features = 1;
    for (size_t i = sequence ? 1 : 0; i < shape.size(); ++i)
        features *= static_cast<size_t>(shape[i]);
    Mat<float> m(positions, static_cast<int>(features));
    std::copy(data.begin(), data.end(), m.v.begin());
    return m;
}

}  // namespace

Example make_example(const SessionLog& session, ReprKind kind, const WindowSpec& window,
                     Task task, int proficiency, const sessions::ViewportMap& viewport) {
    features::Representation rep = features::build_representation(session, window, kind, viewport);
    Example ex;
    ex.participant_id = session.meta.participant_id;
    ex.trial_id = session.meta.trial_id;
    ex.inputs = to_inputs(rep.shape, rep.data, features::repr_is_sequence(kind));
    fill_labels(ex, task, session, window, proficiency, ex.inputs.rows);
    return ex;
}

Example example_from_feature(const Feature& feature, Task task) {
    ReprKind kind = features::repr_kind_from_name(feature.meta.kind);
    Example ex;
    ex.participant_id = feature.meta.participant_id;
    ex.trial_id = feature.meta.trial_id;
    ex.inputs = to_inputs(feature.tensor.shape, feature.tensor.data,
                          features::repr_is_sequence(kind));
    const int positions = ex.inputs.rows;
    switch (task) {
        case Task::Trust:
            if (feature.meta.trust < 0)
                throw ValidationError("feature.labels.trust", "missing in sidecar");
            ex.labels.assign(positions, feature.meta.trust);
            ex.mask.assign(positions, 1);
            break;
        case Task::Proficiency:
            if (feature.meta.proficiency < 0)
                throw ValidationError("feature.labels.proficiency", "missing in sidecar");
            ex.labels.assign(positions, feature.meta.proficiency);
            ex.mask.assign(positions, 1);
            break;
        case Task::Intent: {
            const std::vector<int>& intent = feature.meta.intent;
            if (static_cast<int>(intent.size()) != feature.meta.window.length)
                throw ValidationError("feature.labels.intent", "length != window length");
            if (positions == 1)
                ex.labels.assign(1, intent.back());
            else
                ex.labels = intent;
            ex.mask.resize(ex.labels.size());
            for (size_t i = 0; i < ex.labels.size(); ++i) ex.mask[i] = ex.labels[i] >= 0;
            break;
        }
    }
    return ex;
}

Dataset assemble_dataset(std::vector<Example> examples, ReprKind kind,
                         const WindowSpec& window, Task task) {
    Dataset ds;
    ds.n_classes = task_classes(task);
    ds.sequence = features::repr_is_sequence(kind);
    ds.positions = ds.sequence ? window.length : 1;
    ds.examples = std::move(examples);
    for (const Example& ex : ds.examples) {
        if (ex.inputs.rows != ds.positions)
            throw ValidationError("dataset", "inconsistent window length across examples");
        if (ds.input_dim == 0)
            ds.input_dim = ex.inputs.cols;
        else if (ex.inputs.cols != ds.input_dim)
            throw ValidationError("dataset", "inconsistent feature width across examples");
    }
    return ds;
}

Dataset load_dataset(const std::filesystem::path& dir, ReprKind kind, const WindowSpec& window,
                     Task task, const std::string& agent, const std::string& layout) {
    std::filesystem::path kind_dir = dir / features::repr_kind_name(kind);
    std::vector<Example> examples;
    for (const auto& file : list_files(kind_dir, ".ogt")) {
        std::filesystem::path base = kind_dir / file;
        base.replace_extension();
        Feature feature = features::read_feature(base);
        if (feature.meta.window.start_t != window.start_t ||
            feature.meta.window.length != window.length)
            continue;
        if (!agent.empty() && feature.meta.agent != agent) continue;
        if (!layout.empty() && feature.meta.layout != layout) continue;
        examples.push_back(example_from_feature(feature, task));
    }
    return assemble_dataset(std::move(examples), kind, window, task);
}

}  // namespace og::experiments
