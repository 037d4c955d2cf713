#include "overgaze/experiments/split.hpp"

#include <algorithm>

#include "overgaze/common/error.hpp"
#include "overgaze/common/rng.hpp"

namespace og::experiments {

bool SplitSpec::contains_train(const std::string& id) const {
    return std::find(train.begin(), train.end(), id) != train.end();
}

bool SplitSpec::contains_test(const std::string& id) const {
    return std::find(test.begin(), test.end(), id) != test.end();
}

SplitSpec split_participants(std::vector<std::string> ids, std::array<int, 3> ratios,
                             uint64_t seed) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    const size_t n = ids.size();
    if (n < 3)
        throw ValidationError("split", "need at least 3 participants, got " + std::to_string(n));
    const int total_ratio = ratios[0] + ratios[1] + ratios[2];
    if (total_ratio <= 0 || ratios[0] <= 0)
        throw ValidationError("split", "ratios must be positive");

    Rng rng(derive_seed(seed, "split"));
    rng.shuffle(ids);

    // Largest-remainder apportionment of n over the three partitions.
    std::array<size_t, 3> sizes;
    std::array<std::pair<long long, int>, 3> remainders;  // (-remainder, index) for sorting
    size_t assigned = 0;
    for (int i = 0; i < 3; ++i) {
        size_t num = n * static_cast<size_t>(ratios[i]);
        sizes[i] = num / total_ratio;
        assigned += sizes[i];
        remainders[i] = {-static_cast<long long>(num % total_ratio), i};
    }
    std::sort(remainders.begin(), remainders.end());
    for (size_t leftover = n - assigned, i = 0; i < leftover; ++i)
        ++sizes[remainders[i % 3].second];

    SplitSpec split;
    split.seed = seed;
    auto it = ids.begin();
    split.train.assign(it, it + sizes[0]);
    it += sizes[0];
    split.val.assign(it, it + sizes[1]);
    it += sizes[1];
    split.test.assign(it, it + sizes[2]);
    return split;
}

}  // namespace og::experiments
