#pragma once

// On-disk featurized examples.  The tensor goes in a small binary container
// ("OGT1" magic, u32 rank, u32 dims, little-endian f32 payload); everything
// a trainer needs to interpret it — representation kind, window, labels,
// session identity — rides in a JSON sidecar next to it.

#include <filesystem>
#include <string>
#include <vector>

#include "overgaze/features/representation.hpp"

namespace og::features {

struct Tensor {
    std::vector<int> shape;
    std::vector<float> data;  // row-major

    size_t size() const { return data.size(); }
};

void write_tensor(const std::filesystem::path& path, const std::vector<int>& shape,
                  const std::vector<double>& data);
Tensor read_tensor(const std::filesystem::path& path);  // throws ParseError on a bad container

struct FeatureMeta {
    std::string participant_id;
    int trial_id = 0;
    std::string layout;
    std::string agent;
    std::string kind;  // representation kind name
    WindowSpec window;
    int trust = -1;           // 0..6, -1 if absent
    int proficiency = -1;     // tertile 0..2, -1 if absent
    std::vector<int> intent;  // next-subtask id per window timestep, -1 = masked

    std::string key() const;  // stable identity: participant/trial/kind/window
};

// Writes base.ogt (tensor) and base.json (sidecar).
void write_feature(const std::filesystem::path& base, const Representation& rep,
                   const FeatureMeta& meta);

struct Feature {
    Tensor tensor;
    FeatureMeta meta;
};

Feature read_feature(const std::filesystem::path& base);

}  // namespace og::features
