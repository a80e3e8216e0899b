#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ruscarl/grader.hpp"
#include "ruscarl/policy.hpp"
#include "ruscarl/rubric.hpp"
#include "ruscarl/scaffold.hpp"

namespace ruscarl {

struct TrainConfig {
    int group_size = 8;
    int batch_size = 16;   // tasks per rollout batch
    int mini_batch = 16;   // groups per optimization pass
    // The objective averages 1/(groups * G * |o|) per token, so absolute
    // learning rates are large for the tabular policy.
    double learning_rate = 10.0;
    double clip_eps = 0.2;
    double kl_coef = 1e-3;
    int total_steps = 200;
    std::uint64_t seed = 0;
    int vocab_size = 32;
    ScaffoldConfig scaffold;
    SamplingConfig sampling;

    int eval_samples_per_task = 4;  // unscaffolded evaluation draws
    int diversity_every = 0;        // 0 disables diversity telemetry

    void validate() const;
};

struct RolloutSample {
    TokenSeq response;
    ScaffoldAssignment scaffold;
    std::vector<double> old_logps;  // unconditioned, from the rollout snapshot
    JudgmentVector judgments;
    double reward = 0.0;
    double advantage = 0.0;
};

struct RolloutGroup {
    std::string task_id;
    std::vector<RolloutSample> samples;
};

struct StepStats {
    double objective = 0.0;
    double clip_fraction = 0.0;
    double kl_value = 0.0;
};

struct HistoryRecord {
    int step = 0;
    double mean_reward = 0.0;
    double mean_entropy = 0.0;
    double lambda_step = 0.0;
    double clip_fraction = 0.0;
    double kl_value = 0.0;
    std::optional<double> diversity_bleu;
    std::optional<double> diversity_semantic;
};

struct TrainHistory {
    std::vector<HistoryRecord> records;

    void save_jsonl(const std::string& path) const;
    void save_csv(const std::string& path) const;
};

// (r_i - mean) / population std; all-equal rewards give exactly zero
// advantages. Requires at least two rewards.
std::vector<double> compute_advantages(const std::vector<double>& rewards);

// Clipped-surrogate objective with per-token k3 KL-to-reference penalty,
// averaged 1/G over samples and 1/|o_i| over tokens, then over groups.
// When `grad` is non-null the analytic gradient is accumulated into it.
StepStats grpo_objective(const PolicyParams& params, const PolicyParams& ref,
                         const std::vector<RolloutGroup>& groups,
                         const TrainConfig& cfg, GradTable* grad);

// One ascent step over `groups`; returns the pre-update objective stats.
StepStats grpo_step(PolicyParams& params, const PolicyParams& ref,
                    const std::vector<RolloutGroup>& groups,
                    const TrainConfig& cfg);

// Scaffolded rollouts, unconditioned old log-probs, grading, rewards, and
// advantages for one batch of tasks at progress t. Groups whose grading fails
// are dropped and logged.
std::vector<RolloutGroup> rollout_phase(const PolicyParams& snapshot,
                                        const std::vector<RubricTask>& tasks,
                                        double t, Grader& grader,
                                        const TrainConfig& cfg, Rng& rng);

struct TrainResult {
    PolicyParams params;
    TrainHistory history;
};

TrainResult train(const TrainConfig& cfg, const std::vector<RubricTask>& dataset,
                  Grader& grader);

// Mean unscaffolded reward over the dataset, eval_samples_per_task draws per
// task under a seed-derived evaluation stream.
double evaluate_mean_reward(const PolicyParams& params,
                            const std::vector<RubricTask>& tasks,
                            Grader& grader, const TrainConfig& cfg,
                            std::uint64_t eval_seed);

struct BestOfNPoint {
    int n = 0;
    double mean_max_reward = 0.0;
};

// For each task sample max(n_values) unscaffolded responses, grade all, and
// report per n the mean over tasks of the best reward among the first n.
std::vector<BestOfNPoint> best_of_n(const PolicyParams& params,
                                    const std::vector<RubricTask>& tasks,
                                    Grader& grader, const SamplingConfig& sampling,
                                    const std::vector<int>& n_values,
                                    std::uint64_t eval_seed);

// CSV of (t, lambda_step) pairs over the configured step grid.
void write_schedule_csv(const TrainConfig& cfg, const std::string& path);

} // namespace ruscarl
