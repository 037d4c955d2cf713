#pragma once

// Window-position evaluation curves.  Each round contributes a probability
// row per window position; the per-timestep curve scores the argmax at each
// position on its own, while the cumulative curve scores the argmax of the
// mean probabilities over positions 0..t — "what would the model answer
// after watching this much of the window".  Positions where a round's label
// is masked drop that round from both curves at that position.

#include <vector>

#include "overgaze/experiments/dataset.hpp"
#include "overgaze/neural/mat.hpp"

namespace og::experiments {

struct EvalCurve {
    std::vector<double> per_timestep;  // macro F1 of position-t predictions
    std::vector<double> cumulative;    // macro F1 of mean-prob predictions over 0..t
    std::vector<int> support;          // rounds contributing at each position

    double final_f1() const { return cumulative.empty() ? 0.0 : cumulative.back(); }
};

// probs[i] is [positions, n_classes] for examples[i] (softmax rows).  A
// position with no unmasked rounds scores 0 with support 0.
EvalCurve eval_curves(const std::vector<neural::Mat<double>>& probs,
                      const std::vector<Example>& examples, int n_classes);

// Curve for a constant prediction (the train-majority baseline).  The
// cumulative view of a constant is the constant, so both curves coincide.
EvalCurve constant_curves(int predicted_class, const std::vector<Example>& examples,
                          int n_classes);

}  // namespace og::experiments
