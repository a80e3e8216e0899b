#pragma once

#include <vector>

#include "ruscarl/checks.hpp"
#include "ruscarl/policy.hpp"
#include "ruscarl/rubric.hpp"

namespace ruscarl {

// Parameters of the synthetic task family. Positive criteria draw points from
// [pos_points_min, pos_points_max], penalties from [neg_points_min,
// neg_points_max].
struct SynthTaskSpec {
    std::uint64_t seed = 0;
    int task_count = 24;
    int vocab_size = 24;
    int min_criteria = 4;
    int max_criteria = 7;
    double negative_fraction = 0.25;
    int pos_points_min = 1;
    int pos_points_max = 10;
    int neg_points_min = -10;
    int neg_points_max = -1;
    int max_length = 16;

    void validate() const;
};

// Deterministic for a fixed seed. Every task stores a witness sequence that
// achieves normalized reward 1.0 under the oracle grader; unsatisfiable
// draws are rejected and resampled.
std::vector<RubricTask> generate_tasks(const SynthTaskSpec& spec);

inline bool oracle_check(const TokenSeq& seq, const SyntheticCheck& check) {
    return check.eval(seq.tokens);
}

} // namespace ruscarl
