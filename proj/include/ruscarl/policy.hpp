#pragma once

#include <Eigen/Dense>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ruscarl/rng.hpp"
#include "ruscarl/rubric.hpp"

namespace ruscarl {

// Token 0 is the reserved end-of-sequence marker; content tokens are 1..V-1.
inline constexpr int kEosToken = 0;

struct TokenSeq {
    std::vector<int> tokens;
    bool terminated = false;

    std::string to_text() const;
    static TokenSeq from_text(const std::string& text);
};

struct SamplingConfig {
    double temperature = 0.7;
    double top_p = 0.8;
    int top_k = 20;
    int max_length = 16;

    void validate() const;
};

// First-order tabular softmax policy: one logit row per (task context,
// previous token) pair. Row 0 of each context table is the start state, row
// 1 + k follows token k. Missing contexts behave as all-zero logits.
class PolicyParams {
public:
    PolicyParams() = default;
    PolicyParams(int vocab_size, int max_length)
        : vocab_size_(vocab_size), max_length_(max_length) {}

    int vocab_size() const { return vocab_size_; }
    int max_length() const { return max_length_; }

    // Row of logits for (context, previous token); prev = -1 is the start
    // state. Const access to an unknown context yields zeros.
    Eigen::VectorXd logits_at(const std::string& ctx, int prev) const;

    // Mutable context table, created zero-initialized on first touch.
    Eigen::MatrixXd& context_table(const std::string& ctx);
    const std::map<std::string, Eigen::MatrixXd>& tables() const { return tables_; }

    void save(const std::string& path) const;
    static PolicyParams load(const std::string& path);

private:
    int vocab_size_ = 0;
    int max_length_ = 0;
    std::map<std::string, Eigen::MatrixXd> tables_;
};

// Sparse gradient with the same layout as the policy tables.
using GradTable = std::map<std::string, Eigen::MatrixXd>;

// params += scale * grad.
void apply_gradient(PolicyParams& params, const GradTable& grad, double scale);

// Prefix-dependent additive logit bias realizing a scaffold subset for the
// toy policy. Zero bias when the subset is empty.
class GuidanceBias {
public:
    GuidanceBias() = default;
    static GuidanceBias from_subset(const std::vector<Criterion>& subset,
                                    double strength, int vocab_size);

    bool empty() const { return directives_.empty(); }
    Eigen::VectorXd bias_at(std::span<const int> prefix) const;

private:
    struct Directive {
        SyntheticCheck check;
        bool desirable = true;  // sign of the owning criterion's points
    };
    std::vector<Directive> directives_;
    double strength_ = 0.0;
    int vocab_size_ = 0;
};

Eigen::VectorXd softmax(const Eigen::VectorXd& logits);

// Autoregressive sampling from softmax((logits + bias) / temperature) with
// top-k then top-p truncation. Stops at the end token or max_length. The bias
// shapes sampling only; it leaves the parameters and the returned sequence
// untouched.
TokenSeq sample_response(const PolicyParams& params, const std::string& ctx,
                         const GuidanceBias& bias, const SamplingConfig& cfg,
                         Rng& rng);

// Per-token log-probabilities under the unbiased, untempered policy.
std::vector<double> log_prob(const PolicyParams& params, const std::string& ctx,
                             const TokenSeq& seq);

double sum_log_prob(const PolicyParams& params, const std::string& ctx,
                    const TokenSeq& seq);

// Shannon entropy of the next-token distribution after `prefix`.
double token_entropy(const PolicyParams& params, const std::string& ctx,
                     std::span<const int> prefix);

// Mean next-token entropy over every position of every provided sequence.
double mean_trajectory_entropy(
    const PolicyParams& params,
    const std::vector<std::pair<std::string, TokenSeq>>& seqs);

// d(sum_t log pi(o_t | .)) / d logits: one-hot minus softmax at each visited
// state, exactly zero elsewhere.
GradTable logprob_gradient(const PolicyParams& params, const std::string& ctx,
                           const TokenSeq& seq);

// Adds coeff * (onehot(token) - softmax(logits)) to the gradient row for
// (ctx, prev). Shared by the plain log-prob gradient and the GRPO surrogate.
void add_logprob_grad_term(const PolicyParams& params, const std::string& ctx,
                           int prev, int token, double coeff, GradTable& grad);

} // namespace ruscarl
