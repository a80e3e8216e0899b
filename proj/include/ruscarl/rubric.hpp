#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ruscarl/checks.hpp"

namespace ruscarl {

// One weighted checklist item. Negative points penalize undesirable behaviors
// when they occur.
struct Criterion {
    std::string id;
    std::string text;
    double points = 0.0;
    // Absent check means the criterion is free-text (LLM-judge only).
    std::optional<SyntheticCheck> check;
};

// Ordered list of criteria; order is significant, judgments align by position.
struct Rubric {
    std::vector<Criterion> criteria;

    std::size_t size() const { return criteria.size(); }
};

struct ConversationTurn {
    std::string role;  // "user" or "assistant"
    std::string content;
};

struct RubricTask {
    std::string task_id;
    std::vector<ConversationTurn> conversation;
    Rubric rubric;
    // Optional full-credit witness sequence (synthetic tasks only).
    std::vector<int> witness;
};

// Per-criterion binary grading outcome, aligned 1:1 with the rubric.
struct JudgmentVector {
    std::vector<bool> met;
    std::vector<std::string> explanations;  // optional, same length when present
};

struct ScoreReport {
    std::vector<double> score_vector;
    double total_positive = 0.0;
    double reward = 0.0;
};

// Throws RubricInvalid on any structural violation (empty, zero points,
// duplicate ids, no positive-point criterion).
void validate_rubric(const Rubric& rubric);
void validate_task(const RubricTask& task);

// Sum of points over positive-point criteria; strictly positive for a valid
// rubric.
double positive_total(const Rubric& rubric);

// s_i = b_i * p_i elementwise.
std::vector<double> score_vector(const JudgmentVector& judgments,
                                 const Rubric& rubric);

// Sum of the score vector normalized by the total possible score. May be
// negative when only negative-point criteria fire; never exceeds 1.
double normalized_reward(const std::vector<double>& scores,
                         double total_positive);

ScoreReport score_report(const JudgmentVector& judgments, const Rubric& rubric);

} // namespace ruscarl
