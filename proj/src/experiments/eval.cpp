#include "overgaze/experiments/eval.hpp"

#include "overgaze/common/error.hpp"
#include "overgaze/experiments/metrics.hpp"

namespace og::experiments {

using neural::Mat;

namespace {

// Ties resolve to the lowest class id.
int argmax_row(const double* row, int n) {
    int best = 0;
    for (int k = 1; k < n; ++k)
        if (row[k] > row[best]) best = k;
    return best;
}

int positions_of(const std::vector<Example>& examples) {
    if (examples.empty()) throw ValidationError("eval", "no rounds to evaluate");
    int positions = static_cast<int>(examples[0].mask.size());
    for (const Example& ex : examples)
        if (static_cast<int>(ex.mask.size()) != positions ||
            static_cast<int>(ex.labels.size()) != positions)
            throw ValidationError("eval", "rounds disagree on window length");
    return positions;
}

double scored_f1(const std::vector<int>& preds, const std::vector<int>& golds, int n_classes) {
    if (preds.empty()) return 0.0;
    return f1_macro(preds, golds, n_classes);
}

}  // namespace

EvalCurve eval_curves(const std::vector<Mat<double>>& probs,
                      const std::vector<Example>& examples, int n_classes) {
    int positions = positions_of(examples);
    if (probs.size() != examples.size())
        throw ValidationError("eval", "probability rounds != example rounds");
    for (const Mat<double>& p : probs) {
        if (p.rows != positions || p.cols != n_classes)
            throw ValidationError("eval", "probability matrix shape mismatch");
        if (!p.all_finite()) throw ValidationError("eval", "non-finite probabilities");
    }

    EvalCurve curve;
    curve.per_timestep.resize(positions);
    curve.cumulative.resize(positions);
    curve.support.resize(positions);

    // Running per-round probability sums over positions 0..t.
    std::vector<std::vector<double>> prefix(examples.size(),
                                            std::vector<double>(n_classes, 0.0));
    for (int t = 0; t < positions; ++t) {
        std::vector<int> step_preds, cum_preds, golds;
        for (size_t i = 0; i < examples.size(); ++i) {
            const double* row = &probs[i].v[static_cast<size_t>(t) * n_classes];
            for (int k = 0; k < n_classes; ++k) prefix[i][k] += row[k];
            if (!examples[i].mask[t]) continue;
            step_preds.push_back(argmax_row(row, n_classes));
            cum_preds.push_back(argmax_row(prefix[i].data(), n_classes));
            golds.push_back(examples[i].labels[t]);
        }
        curve.support[t] = static_cast<int>(golds.size());
        curve.per_timestep[t] = scored_f1(step_preds, golds, n_classes);
        curve.cumulative[t] = scored_f1(cum_preds, golds, n_classes);
    }
    return curve;
}

EvalCurve constant_curves(int predicted_class, const std::vector<Example>& examples,
                          int n_classes) {
    if (predicted_class < 0 || predicted_class >= n_classes)
        throw ValidationError("eval", "constant prediction out of class range");
    int positions = positions_of(examples);
    EvalCurve curve;
    curve.per_timestep.resize(positions);
    curve.cumulative.resize(positions);
    curve.support.resize(positions);
    for (int t = 0; t < positions; ++t) {
        std::vector<int> preds, golds;
        for (const Example& ex : examples) {
            if (!ex.mask[t]) continue;
            preds.push_back(predicted_class);
            golds.push_back(ex.labels[t]);
        }
        curve.support[t] = static_cast<int>(golds.size());
        double f1 = scored_f1(preds, golds, n_classes);
        curve.per_timestep[t] = f1;
        curve.cumulative[t] = f1;
    }
    return curve;
}

}  // namespace og::experiments
