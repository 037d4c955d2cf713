#pragma once

// One experiment = one (task, representation, model, agent/layout group)
// cell: fit on the train participants, early-stop on pooled validation
// macro F1, then report per-position and cumulative curves on the held-out
// test participants next to the train-majority baseline.  Everything is
// deterministic under the experiment seed, so reruns produce byte-identical
// reports.

#include <string>
#include <vector>

#include "overgaze/experiments/dataset.hpp"
#include "overgaze/experiments/eval.hpp"
#include "overgaze/experiments/split.hpp"
#include "overgaze/neural/model.hpp"
#include "overgaze/neural/optim.hpp"

namespace og::experiments {

enum class ModelKind { Transformer, Mlp, Majority };

std::string model_kind_name(ModelKind kind);
ModelKind model_kind_from_name(const std::string& name);

// Epochs without validation improvement before training stops.
inline constexpr int kEarlyStopPatience = 10;

struct ExperimentSpec {
    std::string name;
    Task task = Task::Proficiency;
    features::ReprKind representation = features::ReprKind::Game;
    features::WindowSpec window;
    std::string agent;   // teammate policy of the group ("" = pooled)
    std::string layout;  // layout of the group ("" = pooled)
    ModelKind model = ModelKind::Transformer;
    neural::ModelConfig arch;
    neural::TrainConfig train;

    // Sequence representations go to the transformer, collapsed ones to the
    // MLP; the majority baseline accepts either.  Throws ConfigError.
    void check() const;
};

struct DatasetSplit {
    std::vector<Example> train, val, test;
};

// Routes each example by its participant id; ids absent from the split are
// an error (the split must be built from the same roster).
DatasetSplit partition_examples(const Dataset& ds, const SplitSpec& split);

struct TrainOutcome {
    neural::ParamStore<float> params;  // best-validation weights
    int epochs_trained = 0;
    int best_epoch = 0;  // 1-based; equals epochs_trained when val is empty
    double best_val_f1 = 0.0;
};

// Minibatch RAdam with warmup over shuffled examples; gradients average over
// the examples of a batch, and each example's loss is the mean over its
// unmasked positions.  Passing an empty val set disables early stopping.
TrainOutcome fit_transformer(const neural::ModelConfig& arch, const neural::TrainConfig& train,
                             const std::vector<Example>& train_set,
                             const std::vector<Example>& val_set);
TrainOutcome fit_mlp(const neural::ModelConfig& arch, const neural::TrainConfig& train,
                     const std::vector<Example>& train_set,
                     const std::vector<Example>& val_set);

// Eval-mode class probabilities, one [positions, n_classes] matrix per
// example.  `kind` must be Transformer or Mlp.
std::vector<neural::Mat<double>> model_probs(ModelKind kind, const neural::ModelConfig& arch,
                                             const neural::ParamStore<float>& params,
                                             const std::vector<Example>& examples);

// Macro F1 over all unmasked (example, position) pairs pooled together —
// the early-stopping criterion.  Ties in F1 (common once a small validation
// set saturates) break toward lower pooled cross-entropy.
double pooled_f1(const std::vector<neural::Mat<double>>& probs,
                 const std::vector<Example>& examples, int n_classes);
double pooled_loss(const std::vector<neural::Mat<double>>& probs,
                   const std::vector<Example>& examples, int n_classes);

struct ExperimentResult {
    ExperimentSpec spec;
    SplitSpec split;
    int n_classes = 0;
    int input_dim = 0;
    int majority = 0;  // most frequent unmasked train label
    size_t n_train = 0, n_val = 0, n_test = 0;
    EvalCurve test_curve;
    EvalCurve baseline_curve;
    int epochs_trained = 0;
    int best_epoch = 0;
    neural::ModelConfig arch_used;      // spec.arch with dims filled in
    neural::ParamStore<float> weights;  // empty for the majority baseline

    double final_f1() const { return test_curve.final_f1(); }
    double baseline_final_f1() const { return baseline_curve.final_f1(); }
};

ExperimentResult run_experiment(const ExperimentSpec& spec, const Dataset& ds,
                                const SplitSpec& split);

// Canonical report bytes (reruns of the same experiment match exactly).
std::string report_json(const ExperimentResult& result);
std::string report_csv(const ExperimentResult& result);

}  // namespace og::experiments
