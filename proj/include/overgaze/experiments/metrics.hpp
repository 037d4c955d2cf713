#pragma once

// Macro-averaged F1, the primary metric.  Averaging runs over the classes
// present in the gold labels only, so rare-but-absent classes cannot zero
// out the score of an otherwise perfect predictor.

#include <vector>

namespace og::experiments {

// Per-class F1 = 2PR/(P+R), 0 when P+R = 0; macro = unweighted mean over
// classes that occur in `labels`.  Predictions outside [0, n_classes) are
// invalid.  Throws ValidationError on empty or mismatched inputs.
double f1_macro(const std::vector<int>& predictions, const std::vector<int>& labels,
                int n_classes);

// Most frequent label; ties break to the lowest class id.  Throws
// ValidationError on empty input.
int majority_class(const std::vector<int>& labels, int n_classes);

}  // namespace og::experiments
