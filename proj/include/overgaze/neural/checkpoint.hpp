#pragma once

// Checkpoint container: "OGCK" magic, a JSON header (model kind + config +
// free-form extras), then named parameter blobs as shape + little-endian
// 64-bit floats.  Reload is bit-exact; 32-bit training weights pass through
// doubles unchanged.

#include <filesystem>
#include <string>
#include <vector>

#include "overgaze/neural/model.hpp"

namespace og::neural {

struct Checkpoint {
    std::string model;  // "transformer" or "mlp"
    ModelConfig config;
    std::string extra;  // optional JSON object with trainer bookkeeping
    std::vector<std::pair<std::string, Mat<double>>> blobs;
};

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::filesystem::path& path);

std::string model_config_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const std::string& text);

template <typename T>
std::vector<std::pair<std::string, Mat<double>>> to_blobs(const ParamStore<T>& params) {
    std::vector<std::pair<std::string, Mat<double>>> blobs;
    for (const auto& name : params.names()) {
        const Mat<T>& m = params.at(name);
        Mat<double> d(m.rows, m.cols);
        for (size_t i = 0; i < m.v.size(); ++i) d.v[i] = static_cast<double>(m.v[i]);
        blobs.emplace_back(name, std::move(d));
    }
    return blobs;
}

// Loads blob values into an already-initialized store; every name must match
// in both directions with identical shapes.
template <typename T>
void from_blobs(const std::vector<std::pair<std::string, Mat<double>>>& blobs,
                ParamStore<T>& params) {
    if (blobs.size() != params.names().size())
        throw ConfigError("checkpoint: parameter count mismatch");
    for (const auto& [name, d] : blobs) {
        Mat<T>& m = params.at(name);
        if (m.rows != d.rows || m.cols != d.cols)
            throw ConfigError("checkpoint: shape mismatch for '" + name + "'");
        for (size_t i = 0; i < d.v.size(); ++i) m.v[i] = static_cast<T>(d.v[i]);
    }
}

}  // namespace og::neural
