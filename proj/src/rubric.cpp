#include "ruscarl/rubric.hpp"

#include <cmath>
#include <unordered_set>

#include "ruscarl/errors.hpp"

namespace ruscarl {

void validate_rubric(const Rubric& rubric) {
    if (rubric.criteria.empty()) {
        throw RubricInvalid("rubric has no criteria");
    }
    std::unordered_set<std::string> ids;
    bool any_positive = false;
    for (const auto& c : rubric.criteria) {
        if (c.text.empty()) {
            throw RubricInvalid("criterion '" + c.id + "' has empty text");
        }
        if (c.points == 0.0) {
            throw RubricInvalid("criterion '" + c.id + "' has zero points");
        }
        if (!std::isfinite(c.points)) {
            throw RubricInvalid("criterion '" + c.id + "' has non-finite points");
        }
        if (!ids.insert(c.id).second) {
            throw RubricInvalid("duplicate criterion id '" + c.id + "'");
        }
        if (c.points > 0.0) any_positive = true;
    }
    if (!any_positive) {
        throw RubricInvalid("rubric has no positive-point criterion");
    }
}

void validate_task(const RubricTask& task) {
    if (task.conversation.empty()) {
        throw RubricInvalid("task '" + task.task_id + "' has empty conversation");
    }
    if (task.conversation.back().role != "user") {
        throw RubricInvalid("task '" + task.task_id +
                            "' conversation must end with a user turn");
    }
    for (const auto& turn : task.conversation) {
        if (turn.role != "user" && turn.role != "assistant") {
            throw RubricInvalid("task '" + task.task_id + "' has bad role '" +
                                turn.role + "'");
        }
    }
    validate_rubric(task.rubric);
}

double positive_total(const Rubric& rubric) {
    double total = 0.0;
    bool any = false;
    for (const auto& c : rubric.criteria) {
        if (c.points > 0.0) {
            total += c.points;
            any = true;
        }
    }
    if (!any) {
        throw RubricInvalid("rubric has no positive-point criterion");
    }
    return total;
}

std::vector<double> score_vector(const JudgmentVector& judgments,
                                 const Rubric& rubric) {
    if (judgments.met.size() != rubric.criteria.size()) {
        throw LengthMismatch("judgment vector length " +
                             std::to_string(judgments.met.size()) +
                             " != rubric size " +
                             std::to_string(rubric.criteria.size()));
    }
    std::vector<double> scores(rubric.criteria.size(), 0.0);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        scores[i] = judgments.met[i] ? rubric.criteria[i].points : 0.0;
    }
    return scores;
}

double normalized_reward(const std::vector<double>& scores,
                         double total_positive) {
    if (!(total_positive > 0.0)) {
        throw RubricInvalid("total possible score must be positive");
    }
    double sum = 0.0;
    for (double s : scores) sum += s;
    return sum / total_positive;
}

ScoreReport score_report(const JudgmentVector& judgments, const Rubric& rubric) {
    ScoreReport report;
    report.score_vector = score_vector(judgments, rubric);
    report.total_positive = positive_total(rubric);
    report.reward = normalized_reward(report.score_vector, report.total_positive);
    return report;
}

} // namespace ruscarl
