#pragma once

// Declarative run configuration: one TOML file names the data directories,
// the synthetic cohort (participants, skill levels, agent and layout
// roster), the featurization grid, and the experiment list.  Every stage
// seeds itself from the single global seed via documented tags
// ("simulate/<participant>/t<trial>", "split", "train/<experiment>"), so
// any stage can be rerun in isolation and reproduce the same bytes.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "overgaze/experiments/runner.hpp"
#include "overgaze/features/representation.hpp"

namespace og::cli {

struct PathsConfig {
    std::filesystem::path sessions = "data/sessions";
    std::filesystem::path features = "data/features";
    std::filesystem::path reports = "data/reports";
};

struct DatasetConfig {
    int participants = 6;
    std::vector<double> skill_levels{0.1, 0.5, 0.9};
    std::vector<std::string> agents{"random", "rigid", "adaptive"};
    std::vector<std::string> layouts{"asymmetric_advantages", "coordination_ring",
                                     "counter_circuit"};

    // Trial design: each participant plays every agent-layout pair exactly
    // twice (18 rounds with the full three-by-three roster).
    int rounds_per_participant() const {
        return 2 * static_cast<int>(agents.size() * layouts.size());
    }
};

struct RunConfig {
    uint64_t seed = 0;
    PathsConfig paths;
    DatasetConfig dataset;
    std::vector<features::ReprKind> featurize_kinds;  // default: all five
    std::vector<features::WindowSpec> featurize_windows{{0, 20}, {200, 20}};
    std::vector<experiments::ExperimentSpec> experiments;
};

// Unknown keys anywhere are errors.  `seed_override` (the --seed flag) wins
// over the file's seed and feeds every derived seed.
RunConfig parse_run_config(const std::string& text, const uint64_t* seed_override = nullptr);
RunConfig load_run_config(const std::filesystem::path& path,
                          const uint64_t* seed_override = nullptr);

struct RoundPlan {
    std::string participant_id;
    int trial_id = 0;
    std::string agent;
    std::string layout;
    double skill = 0.0;
    uint64_t seed = 0;

    std::string file() const;  // "p000_t00.jsonl"
};

// Expands the cohort into one plan per session.  Pairs cycle in agent-major
// order (two full cycles per participant); skill levels round-robin over
// participants so the proficiency classes stay balanced by construction.
std::vector<RoundPlan> plan_rounds(const RunConfig& config);

}  // namespace og::cli
