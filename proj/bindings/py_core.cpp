// Python bindings for the main pipeline operations.  Sessions cross the
// boundary as files (the canonical JSONL format) rather than as mirrored
// structs; tensors come back as numpy arrays.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "overgaze/common/error.hpp"
#include "overgaze/experiments/metrics.hpp"
#include "overgaze/features/encoding.hpp"
#include "overgaze/features/representation.hpp"
#include "overgaze/gridworld/layout.hpp"
#include "overgaze/gridworld/simulate.hpp"
#include "overgaze/gridworld/types.hpp"
#include "overgaze/labels/labels.hpp"
#include "overgaze/sessions/session.hpp"
#include "overgaze/sessions/session_io.hpp"

namespace py = pybind11;

namespace {

og::sessions::SessionLog load(const std::string& path) {
    return og::sessions::read_session(path);
}

og::sessions::ViewportMap viewport_of(const og::sessions::SessionLog& log) {
    const og::gridworld::Layout& layout = og::gridworld::builtin_layout(log.meta.layout);
    return og::sessions::default_viewport(layout.rows, layout.cols);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Synthetic Overcooked gameplay+gaze pipeline (C++ core)";

    m.attr("ROUND_STEPS") = og::gridworld::kRoundSteps;
    m.attr("GAZE_PER_STEP") = og::gridworld::kGazePerStep;
    m.attr("STATE_CHANNELS") = og::features::kStateChannels;

    m.def("layouts", [] { return og::gridworld::builtin_layout_names(); },
          "Names of the bundled kitchen layouts.");

    m.def("subtask_names", [] {
        std::vector<std::string> names;
        for (int i = 0; i < og::gridworld::kNumSubtasks; ++i)
            names.push_back(og::gridworld::subtask_name(static_cast<og::gridworld::Subtask>(i)));
        return names;
    });

    m.def(
        "simulate_session",
        [](const std::string& layout, const std::string& agent, double skill,
           const std::string& participant_id, int trial_id, uint64_t seed,
           const std::string& path) {
            og::gridworld::SimConfig cfg;
            cfg.layout = layout;
            cfg.agent = og::gridworld::policy_kind_from_name(agent);
            cfg.skill = skill;
            cfg.participant_id = participant_id;
            cfg.trial_id = trial_id;
            cfg.seed = seed;
            og::sessions::SessionLog log = og::gridworld::simulate_session(cfg);
            og::sessions::write_session(log, path);
            return og::labels::final_score(log);
        },
        py::arg("layout"), py::arg("agent"), py::arg("skill"), py::arg("participant_id"),
        py::arg("trial_id"), py::arg("seed"), py::arg("path"),
        "Simulate one round, write it as canonical JSONL, return the final score.");

    m.def(
        "session_info",
        [](const std::string& path) {
            og::sessions::SessionLog log = load(path);
            og::sessions::GazeCoverage cov = og::sessions::validate_gaze_coverage(log);
            py::dict info;
            info["participant_id"] = log.meta.participant_id;
            info["trial_id"] = log.meta.trial_id;
            info["layout"] = log.meta.layout;
            info["agent"] = log.meta.agent;
            info["score"] = og::labels::final_score(log);
            info["trust"] = log.survey.present() ? py::cast(log.survey.trust()) : py::none();
            info["missing_fraction"] = cov.missing_fraction;
            info["acceptable"] = cov.acceptable;
            return info;
        },
        py::arg("path"), "Header metadata, outcome, and gaze coverage of a session file.");

    m.def(
        "representation",
        [](const std::string& path, const std::string& kind, int start_t, int length) {
            og::sessions::SessionLog log = load(path);
            og::features::Representation rep = og::features::build_representation(
                log, {start_t, length}, og::features::repr_kind_from_name(kind),
                viewport_of(log));
            std::vector<py::ssize_t> shape(rep.shape.begin(), rep.shape.end());
            py::array_t<double> arr(shape);
            std::copy(rep.data.begin(), rep.data.end(), arr.mutable_data());
            return arr;
        },
        py::arg("path"), py::arg("kind"), py::arg("start_t") = 0, py::arg("length") = 20,
        "Build one of the five input representations as a numpy array.");

    m.def(
        "intent_labels",
        [](const std::string& path, int start_t, int length) {
            return og::labels::intent_labels(load(path), {start_t, length});
        },
        py::arg("path"), py::arg("start_t") = 0, py::arg("length") = 20,
        "Next-subtask id per window timestep (-1 = masked).");

    m.def(
        "detect_subtasks",
        [](const std::string& path) {
            std::vector<std::pair<int, std::string>> out;
            for (const auto& [t, subtask] : og::labels::detect_subtasks(load(path)))
                out.emplace_back(t, og::gridworld::subtask_name(subtask));
            return out;
        },
        py::arg("path"), "Completed (timestep, subtask) pairs of the human proxy.");

    m.def(
        "proficiency_bins",
        [](const std::vector<std::pair<std::string, int>>& scores, const std::string& group) {
            return og::labels::proficiency_bins(scores, group);
        },
        py::arg("scores"), py::arg("group") = "group",
        "Tertile bin (0/1/2) per session key from final scores.");

    m.def("f1_macro", &og::experiments::f1_macro, py::arg("predictions"), py::arg("labels"),
          py::arg("n_classes"), "Macro F1 over classes present in the gold labels.");

    py::register_exception<og::Error>(m, "OvergazeError");
}
