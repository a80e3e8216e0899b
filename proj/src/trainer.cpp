#include "ruscarl/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numeric>

#include <json.hpp>

#include "ruscarl/errors.hpp"
#include "ruscarl/metrics.hpp"

namespace ruscarl {

using nlohmann::json;

void TrainConfig::validate() const {
    if (group_size < 2) throw BadConfig("group size must be >= 2");
    if (batch_size < 1) throw BadConfig("batch size must be >= 1");
    if (mini_batch < 1 || mini_batch > batch_size) {
        throw BadConfig("mini batch must lie in [1, batch size]");
    }
    if (!(clip_eps > 0.0)) throw BadConfig("clip coefficient must be > 0");
    if (kl_coef < 0.0) throw BadConfig("KL coefficient must be >= 0");
    if (total_steps < 1) throw BadConfig("total steps must be >= 1");
    if (vocab_size < 2) throw BadConfig("vocab size must be >= 2");
    if (scaffold.guidance_strength < 0.0) {
        throw BadConfig("guidance strength must be >= 0");
    }
    scaffold.decay.validate();
    sampling.validate();
}

std::vector<double> compute_advantages(const std::vector<double>& rewards) {
    const std::size_t g = rewards.size();
    if (g < 2) throw BadGroup("advantage normalization needs a group of >= 2");
    double mean = 0.0;
    for (double r : rewards) mean += r;
    mean /= static_cast<double>(g);
    double var = 0.0;
    for (double r : rewards) var += (r - mean) * (r - mean);
    var /= static_cast<double>(g);
    const double std_dev = std::sqrt(var);

    std::vector<double> adv(g, 0.0);
    if (std_dev > 0.0) {
        for (std::size_t i = 0; i < g; ++i) {
            adv[i] = (rewards[i] - mean) / std_dev;
        }
    }
    return adv;
}

StepStats grpo_objective(const PolicyParams& params, const PolicyParams& ref,
                         const std::vector<RolloutGroup>& groups,
                         const TrainConfig& cfg, GradTable* grad) {
    StepStats stats;
    if (groups.empty()) return stats;

    double objective = 0.0;
    std::size_t token_count = 0;
    std::size_t clipped_count = 0;
    double kl_sum = 0.0;
    const double group_weight = 1.0 / static_cast<double>(groups.size());

    for (const auto& group : groups) {
        const double sample_weight =
            group_weight / static_cast<double>(group.samples.size());
        for (const auto& sample : group.samples) {
            const std::size_t len = sample.response.tokens.size();
            if (len == 0) continue;
            const double token_weight =
                sample_weight / static_cast<double>(len);

            const auto new_lps = log_prob(params, group.task_id, sample.response);
            const auto ref_lps = log_prob(ref, group.task_id, sample.response);
            const double adv = sample.advantage;

            int prev = -1;
            for (std::size_t t = 0; t < len; ++t) {
                const int tok = sample.response.tokens[t];
                const double ratio = std::exp(new_lps[t] - sample.old_logps[t]);

                const bool clip_hi = adv > 0.0 && ratio > 1.0 + cfg.clip_eps;
                const bool clip_lo = adv < 0.0 && ratio < 1.0 - cfg.clip_eps;
                const bool clipped = clip_hi || clip_lo;
                const double clipped_ratio =
                    std::clamp(ratio, 1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps);
                const double surrogate =
                    std::min(ratio * adv, clipped_ratio * adv);

                const double delta = ref_lps[t] - new_lps[t];
                const double k3 = std::exp(delta) - delta - 1.0;

                objective += token_weight * (surrogate - cfg.kl_coef * k3);
                kl_sum += k3;
                ++token_count;
                if (clipped) ++clipped_count;

                if (grad) {
                    double coeff = clipped ? 0.0 : adv * ratio;
                    coeff += cfg.kl_coef * (std::exp(delta) - 1.0);
                    if (coeff != 0.0) {
                        add_logprob_grad_term(params, group.task_id, prev, tok,
                                              token_weight * coeff, *grad);
                    }
                }
                prev = tok;
            }
        }
    }

    if (!std::isfinite(objective)) {
        throw NonFiniteLoss("GRPO objective is not finite (groups=" +
                            std::to_string(groups.size()) +
                            ", tokens=" + std::to_string(token_count) + ")");
    }
    stats.objective = objective;
    stats.clip_fraction =
        token_count ? static_cast<double>(clipped_count) /
                          static_cast<double>(token_count)
                    : 0.0;
    stats.kl_value =
        token_count ? kl_sum / static_cast<double>(token_count) : 0.0;
    return stats;
}

StepStats grpo_step(PolicyParams& params, const PolicyParams& ref,
                    const std::vector<RolloutGroup>& groups,
                    const TrainConfig& cfg) {
    GradTable grad;
    const StepStats stats = grpo_objective(params, ref, groups, cfg, &grad);
    apply_gradient(params, grad, cfg.learning_rate);
    return stats;
}

std::vector<RolloutGroup> rollout_phase(const PolicyParams& snapshot,
                                        const std::vector<RubricTask>& tasks,
                                        double t, Grader& grader,
                                        const TrainConfig& cfg, Rng& rng) {
    std::vector<RolloutGroup> groups;
    groups.reserve(tasks.size());

    for (const auto& task : tasks) {
        const auto ratios = integrated_ratios(t, cfg.group_size, cfg.scaffold);

        RolloutGroup group;
        group.task_id = task.task_id;
        group.samples.resize(static_cast<std::size_t>(cfg.group_size));
        bool dropped = false;
        std::vector<double> rewards;
        rewards.reserve(static_cast<std::size_t>(cfg.group_size));

        for (int i = 0; i < cfg.group_size && !dropped; ++i) {
            auto& sample = group.samples[static_cast<std::size_t>(i)];
            sample.scaffold.ratio = ratios[static_cast<std::size_t>(i)];
            sample.scaffold.subset =
                sample_subset(task.rubric, sample.scaffold.ratio, rng);

            const GuidanceBias bias = GuidanceBias::from_subset(
                sample.scaffold.subset, cfg.scaffold.guidance_strength,
                snapshot.vocab_size());
            sample.response = sample_response(snapshot, task.task_id, bias,
                                              cfg.sampling, rng);
            // Update-rule inputs are unconditioned: log pi_old(o|q), never
            // log pi_old(o|q, R_S).
            sample.old_logps = log_prob(snapshot, task.task_id, sample.response);

            try {
                sample.judgments =
                    grade_rubric(grader, task, sample.response.to_text());
            } catch (const GradingUnavailable& e) {
                std::cerr << "dropping group for task " << task.task_id << ": "
                          << e.what() << "\n";
                dropped = true;
                break;
            }
            sample.reward = score_report(sample.judgments, task.rubric).reward;
            rewards.push_back(sample.reward);
        }
        if (dropped) continue;

        const auto advantages = compute_advantages(rewards);
        for (int i = 0; i < cfg.group_size; ++i) {
            group.samples[static_cast<std::size_t>(i)].advantage =
                advantages[static_cast<std::size_t>(i)];
        }
        groups.push_back(std::move(group));
    }
    return groups;
}

TrainResult train(const TrainConfig& cfg, const std::vector<RubricTask>& dataset,
                  Grader& grader) {
    cfg.validate();
    if (dataset.empty()) throw BadConfig("training dataset is empty");

    TrainResult result;
    result.params = PolicyParams(cfg.vocab_size, cfg.sampling.max_length);
    // Reference policy frozen at initialization.
    const PolicyParams ref = result.params;

    Rng rng(cfg.seed);
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);
    shuffle_in_place(order, rng);
    std::size_t cursor = 0;

    for (int step = 0; step < cfg.total_steps; ++step) {
        const double t =
            static_cast<double>(step) / static_cast<double>(cfg.total_steps);

        std::vector<RubricTask> batch;
        batch.reserve(static_cast<std::size_t>(cfg.batch_size));
        for (int b = 0; b < cfg.batch_size; ++b) {
            if (cursor == order.size()) {
                shuffle_in_place(order, rng);
                cursor = 0;
            }
            batch.push_back(dataset[order[cursor++]]);
        }

        // params not yet updated this step, so it doubles as the old snapshot.
        const auto groups =
            rollout_phase(result.params, batch, t, grader, cfg, rng);

        StepStats stats;
        if (!groups.empty()) {
            double weight_total = 0.0;
            for (std::size_t off = 0; off < groups.size();
                 off += static_cast<std::size_t>(cfg.mini_batch)) {
                const std::size_t end = std::min(
                    groups.size(), off + static_cast<std::size_t>(cfg.mini_batch));
                std::vector<RolloutGroup> mb(groups.begin() + static_cast<std::ptrdiff_t>(off),
                                             groups.begin() + static_cast<std::ptrdiff_t>(end));
                const StepStats s = grpo_step(result.params, ref, mb, cfg);
                const double w = static_cast<double>(mb.size());
                stats.objective += s.objective * w;
                stats.clip_fraction += s.clip_fraction * w;
                stats.kl_value += s.kl_value * w;
                weight_total += w;
            }
            stats.objective /= weight_total;
            stats.clip_fraction /= weight_total;
            stats.kl_value /= weight_total;
        }

        HistoryRecord rec;
        rec.step = step;
        rec.lambda_step = step_ratio(t, cfg.scaffold.decay);
        rec.clip_fraction = stats.clip_fraction;
        rec.kl_value = stats.kl_value;

        double reward_sum = 0.0;
        std::size_t reward_count = 0;
        std::vector<std::pair<std::string, TokenSeq>> trajectories;
        for (const auto& group : groups) {
            for (const auto& sample : group.samples) {
                reward_sum += sample.reward;
                ++reward_count;
                trajectories.emplace_back(group.task_id, sample.response);
            }
        }
        rec.mean_reward =
            reward_count ? reward_sum / static_cast<double>(reward_count) : 0.0;
        rec.mean_entropy = mean_trajectory_entropy(result.params, trajectories);

        if (cfg.diversity_every > 0 && step % cfg.diversity_every == 0 &&
            !groups.empty()) {
            std::vector<std::vector<int>> token_responses;
            std::vector<std::string> text_responses;
            for (const auto& sample : groups.front().samples) {
                token_responses.push_back(sample.response.tokens);
                text_responses.push_back(sample.response.to_text());
            }
            rec.diversity_bleu = self_bleu_diversity(token_responses);
            rec.diversity_semantic =
                semantic_distance(text_responses, HashNgramEmbedder());
        }

        result.history.records.push_back(std::move(rec));
    }
    return result;
}

double evaluate_mean_reward(const PolicyParams& params,
                            const std::vector<RubricTask>& tasks,
                            Grader& grader, const TrainConfig& cfg,
                            std::uint64_t eval_seed) {
    Rng rng(eval_seed ^ 0xe5a1ull);
    const GuidanceBias no_bias;
    double total = 0.0;
    std::size_t count = 0;
    for (const auto& task : tasks) {
        for (int s = 0; s < cfg.eval_samples_per_task; ++s) {
            const TokenSeq seq = sample_response(params, task.task_id, no_bias,
                                                 cfg.sampling, rng);
            const auto judgments = grade_rubric(grader, task, seq.to_text());
            total += score_report(judgments, task.rubric).reward;
            ++count;
        }
    }
    return count ? total / static_cast<double>(count) : 0.0;
}

std::vector<BestOfNPoint> best_of_n(const PolicyParams& params,
                                    const std::vector<RubricTask>& tasks,
                                    Grader& grader, const SamplingConfig& sampling,
                                    const std::vector<int>& n_values,
                                    std::uint64_t eval_seed) {
    if (n_values.empty() || !std::is_sorted(n_values.begin(), n_values.end()) ||
        n_values.front() < 1) {
        throw BadConfig("best-of-N requires a sorted list of n >= 1");
    }
    const int max_n = n_values.back();
    Rng rng(eval_seed ^ 0xb0f0ull);
    const GuidanceBias no_bias;

    std::vector<std::vector<double>> rewards(tasks.size());
    for (std::size_t ti = 0; ti < tasks.size(); ++ti) {
        for (int s = 0; s < max_n; ++s) {
            const TokenSeq seq = sample_response(params, tasks[ti].task_id,
                                                 no_bias, sampling, rng);
            const auto judgments = grade_rubric(grader, tasks[ti], seq.to_text());
            rewards[ti].push_back(score_report(judgments, tasks[ti].rubric).reward);
        }
    }

    std::vector<BestOfNPoint> curve;
    for (int n : n_values) {
        double total = 0.0;
        for (const auto& task_rewards : rewards) {
            total += *std::max_element(task_rewards.begin(),
                                       task_rewards.begin() + n);
        }
        curve.push_back({n, total / static_cast<double>(tasks.size())});
    }
    return curve;
}

void TrainHistory::save_jsonl(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw BadConfig("cannot write history: " + path);
    for (const auto& rec : records) {
        json j;
        j["step"] = rec.step;
        j["mean_reward"] = rec.mean_reward;
        j["mean_entropy"] = rec.mean_entropy;
        j["lambda_step"] = rec.lambda_step;
        j["clip_fraction"] = rec.clip_fraction;
        j["kl_value"] = rec.kl_value;
        if (rec.diversity_bleu) j["diversity_1msb"] = *rec.diversity_bleu;
        if (rec.diversity_semantic) j["diversity_sem"] = *rec.diversity_semantic;
        out << j.dump() << "\n";
    }
}

void TrainHistory::save_csv(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw BadConfig("cannot write metrics csv: " + path);
    out << "step,mean_reward,mean_entropy,lambda_step,clip_fraction,kl_value,"
           "diversity_1msb,diversity_sem\n";
    char buf[64];
    auto fmt = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    for (const auto& rec : records) {
        out << rec.step << ',' << fmt(rec.mean_reward) << ','
            << fmt(rec.mean_entropy) << ',' << fmt(rec.lambda_step) << ','
            << fmt(rec.clip_fraction) << ',' << fmt(rec.kl_value) << ','
            << (rec.diversity_bleu ? fmt(*rec.diversity_bleu) : "") << ','
            << (rec.diversity_semantic ? fmt(*rec.diversity_semantic) : "")
            << "\n";
    }
}

void write_schedule_csv(const TrainConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw BadConfig("cannot write schedule csv: " + path);
    out << "t,lambda_step\n";
    char buf[64];
    for (int step = 0; step <= cfg.total_steps; ++step) {
        const double t =
            static_cast<double>(step) / static_cast<double>(cfg.total_steps);
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g", t,
                      step_ratio(t, cfg.scaffold.decay));
        out << buf << "\n";
    }
}

} // namespace ruscarl
