#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

namespace ruscarl {

struct NoveltyStats {
    double mean = 0.0;
    double median = 0.0;
    std::array<double, 3> thresholds{2.0, 10.0, 100.0};
    std::array<std::size_t, 3> counts{0, 0, 0};
};

struct SeqRatio {
    double value = 1.0;
    bool overflowed = false;  // exponent clamped at +-700
};

struct DiversityReport {
    double one_minus_self_bleu = 0.0;
    double mean_semantic_distance = 0.0;
};

// Geometric-mean per-token likelihood ratio exp((sum new - sum old) / |o|),
// computed in log space with the exponent clamped to +-700.
SeqRatio seq_importance_ratio(const std::vector<double>& new_logps,
                              const std::vector<double>& old_logps);

// Mean, lower-middle median, and strict-inequality counts over thresholds.
NoveltyStats novelty_stats(
    const std::vector<double>& ratios,
    const std::array<double, 3>& thresholds = {2.0, 10.0, 100.0});

// 1 - mean BLEU of each response against the others (n-grams up to order 4,
// uniform weights, add-one smoothing on zero matches, standard brevity
// penalty with the closest reference length).
double self_bleu_diversity(const std::vector<std::vector<int>>& responses);
double self_bleu_diversity_text(const std::vector<std::string>& responses);

// Deterministic hashed 1-2 gram count embedding, unit-normalized.
class HashNgramEmbedder {
public:
    explicit HashNgramEmbedder(int dimension = 256) : dimension_(dimension) {}
    int dimension() const { return dimension_; }
    Eigen::VectorXd embed(const std::string& text) const;

private:
    int dimension_;
};

// Mean over unordered pairs of (1 - cosine similarity) of embeddings.
double semantic_distance(const std::vector<std::string>& responses,
                         const HashNgramEmbedder& embedder);

} // namespace ruscarl
