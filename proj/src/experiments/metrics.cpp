#include "overgaze/experiments/metrics.hpp"

#include "overgaze/common/error.hpp"

namespace og::experiments {

double f1_macro(const std::vector<int>& predictions, const std::vector<int>& labels,
                int n_classes) {
    if (labels.empty()) throw ValidationError("f1", "no examples");
    if (predictions.size() != labels.size())
        throw ValidationError("f1", "prediction/label count mismatch");
    if (n_classes < 1) throw ValidationError("f1", "need at least one class");

    std::vector<int> tp(n_classes, 0), fp(n_classes, 0), fn(n_classes, 0), present(n_classes, 0);
    for (size_t i = 0; i < labels.size(); ++i) {
        int p = predictions[i], y = labels[i];
        if (p < 0 || p >= n_classes || y < 0 || y >= n_classes)
            throw ValidationError("f1", "class id out of range");
        present[y] = 1;
        if (p == y)
            ++tp[y];
        else {
            ++fp[p];
            ++fn[y];
        }
    }

    double sum = 0;
    int n_present = 0;
    for (int c = 0; c < n_classes; ++c) {
        if (!present[c]) continue;
        ++n_present;
        // 2PR/(P+R) reduces to 2TP / (2TP + FP + FN); 0 when the class was
        // neither predicted nor recovered.
        int denom = 2 * tp[c] + fp[c] + fn[c];
        if (denom > 0) sum += 2.0 * tp[c] / denom;
    }
    return sum / n_present;
}

int majority_class(const std::vector<int>& labels, int n_classes) {
    if (labels.empty()) throw ValidationError("majority", "no labels");
    std::vector<int> count(n_classes, 0);
    for (int y : labels) {
        if (y < 0 || y >= n_classes) throw ValidationError("majority", "class id out of range");
        ++count[y];
    }
    int best = 0;
    for (int c = 1; c < n_classes; ++c)
        if (count[c] > count[best]) best = c;  // ties keep the lowest id
    return best;
}

}  // namespace og::experiments
