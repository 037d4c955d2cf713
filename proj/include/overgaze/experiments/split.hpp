#pragma once

// Participant-level dataset splitting: every round of a participant lands in
// exactly one partition.  Sizes follow the 59:5:10 participant ratio via
// largest-remainder rounding, so 74 participants reproduce (59, 5, 10)
// exactly and other counts stay proportional.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace og::experiments {

struct SplitSpec {
    std::vector<std::string> train, val, test;
    uint64_t seed = 0;

    bool contains_train(const std::string& id) const;
    bool contains_test(const std::string& id) const;
};

inline constexpr std::array<int, 3> kStudyRatios{59, 5, 10};

// Deterministic under seed; ids are de-duplicated and sorted before the
// seeded shuffle so input order never matters.  Throws ValidationError with
// fewer than 3 participants.
SplitSpec split_participants(std::vector<std::string> ids, std::array<int, 3> ratios,
                             uint64_t seed);

}  // namespace og::experiments
