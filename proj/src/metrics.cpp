#include "ruscarl/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>

#include "ruscarl/errors.hpp"

namespace ruscarl {

SeqRatio seq_importance_ratio(const std::vector<double>& new_logps,
                              const std::vector<double>& old_logps) {
    if (new_logps.size() != old_logps.size()) {
        throw LengthMismatch("log-prob lists differ in length");
    }
    if (new_logps.empty()) {
        throw LengthMismatch("log-prob lists must be nonempty");
    }
    double diff = 0.0;
    for (std::size_t i = 0; i < new_logps.size(); ++i) {
        diff += new_logps[i] - old_logps[i];
    }
    double exponent = diff / static_cast<double>(new_logps.size());
    SeqRatio out;
    if (exponent > 700.0) {
        exponent = 700.0;
        out.overflowed = true;
    } else if (exponent < -700.0) {
        exponent = -700.0;
        out.overflowed = true;
    }
    out.value = std::exp(exponent);
    return out;
}

NoveltyStats novelty_stats(const std::vector<double>& ratios,
                           const std::array<double, 3>& thresholds) {
    if (ratios.empty()) throw EmptyInput("no importance ratios");
    NoveltyStats stats;
    stats.thresholds = thresholds;

    double sum = 0.0;
    for (double r : ratios) sum += r;
    stats.mean = sum / static_cast<double>(ratios.size());

    std::vector<double> sorted = ratios;
    std::sort(sorted.begin(), sorted.end());
    // Lower-middle element for even-length inputs.
    stats.median = sorted[(sorted.size() - 1) / 2];

    for (std::size_t k = 0; k < thresholds.size(); ++k) {
        stats.counts[k] = static_cast<std::size_t>(std::count_if(
            ratios.begin(), ratios.end(),
            [&](double r) { return r > thresholds[k]; }));
    }
    return stats;
}

namespace {

constexpr int kBleuOrder = 4;

template <typename Tok>
using NgramCounts = std::map<std::vector<Tok>, std::size_t>;

template <typename Tok>
NgramCounts<Tok> count_ngrams(const std::vector<Tok>& seq, int n) {
    NgramCounts<Tok> counts;
    if (static_cast<int>(seq.size()) < n) return counts;
    for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= seq.size(); ++i) {
        std::vector<Tok> gram(seq.begin() + static_cast<std::ptrdiff_t>(i),
                              seq.begin() + static_cast<std::ptrdiff_t>(i) + n);
        ++counts[gram];
    }
    return counts;
}

// Multi-reference BLEU of `hyp` against `refs`, order 4, uniform weights,
// add-one smoothing whenever an order has zero clipped matches.
template <typename Tok>
double bleu(const std::vector<Tok>& hyp,
            const std::vector<const std::vector<Tok>*>& refs) {
    double log_prec_sum = 0.0;
    int used_orders = 0;
    for (int n = 1; n <= kBleuOrder; ++n) {
        NgramCounts<Tok> hyp_counts = count_ngrams(hyp, n);
        std::size_t total = 0;
        for (const auto& [gram, c] : hyp_counts) total += c;
        if (total == 0) continue;  // hypothesis shorter than n

        NgramCounts<Tok> ref_max;
        for (const auto* ref : refs) {
            for (const auto& [gram, c] : count_ngrams(*ref, n)) {
                auto& slot = ref_max[gram];
                slot = std::max(slot, c);
            }
        }
        std::size_t matched = 0;
        for (const auto& [gram, c] : hyp_counts) {
            auto it = ref_max.find(gram);
            if (it != ref_max.end()) matched += std::min(c, it->second);
        }
        double prec;
        if (matched == 0) {
            prec = 1.0 / static_cast<double>(total + 1);
        } else {
            prec = static_cast<double>(matched) / static_cast<double>(total);
        }
        log_prec_sum += std::log(prec);
        ++used_orders;
    }
    if (used_orders == 0) return 0.0;

    // Brevity penalty against the closest reference length.
    const std::size_t hyp_len = hyp.size();
    std::size_t closest = refs.front()->size();
    for (const auto* ref : refs) {
        const std::size_t rl = ref->size();
        const auto dist = [&](std::size_t a) {
            return a > hyp_len ? a - hyp_len : hyp_len - a;
        };
        if (dist(rl) < dist(closest) || (dist(rl) == dist(closest) && rl < closest)) {
            closest = rl;
        }
    }
    double bp = 1.0;
    if (hyp_len < closest && hyp_len > 0) {
        bp = std::exp(1.0 - static_cast<double>(closest) /
                                static_cast<double>(hyp_len));
    }
    return bp * std::exp(log_prec_sum / used_orders);
}

template <typename Tok>
double self_bleu_diversity_impl(const std::vector<std::vector<Tok>>& responses) {
    if (responses.size() < 2) {
        throw TooFewResponses("self-BLEU needs at least 2 responses");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < responses.size(); ++i) {
        std::vector<const std::vector<Tok>*> refs;
        for (std::size_t j = 0; j < responses.size(); ++j) {
            if (j != i) refs.push_back(&responses[j]);
        }
        total += bleu(responses[i], refs);
    }
    const double mean_bleu = total / static_cast<double>(responses.size());
    return 1.0 - mean_bleu;
}

std::vector<std::string> whitespace_tokens(const std::string& text) {
    std::vector<std::string> toks;
    std::istringstream in(text);
    std::string t;
    while (in >> t) toks.push_back(t);
    return toks;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace

double self_bleu_diversity(const std::vector<std::vector<int>>& responses) {
    return self_bleu_diversity_impl(responses);
}

double self_bleu_diversity_text(const std::vector<std::string>& responses) {
    std::vector<std::vector<std::string>> tokenized;
    tokenized.reserve(responses.size());
    for (const auto& r : responses) tokenized.push_back(whitespace_tokens(r));
    return self_bleu_diversity_impl(tokenized);
}

Eigen::VectorXd HashNgramEmbedder::embed(const std::string& text) const {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dimension_);
    const auto toks = whitespace_tokens(text);
    for (std::size_t i = 0; i < toks.size(); ++i) {
        v[static_cast<Eigen::Index>(fnv1a(toks[i]) %
                                    static_cast<std::uint64_t>(dimension_))] += 1.0;
        if (i + 1 < toks.size()) {
            v[static_cast<Eigen::Index>(fnv1a(toks[i] + "\x1f" + toks[i + 1]) %
                                        static_cast<std::uint64_t>(dimension_))] += 1.0;
        }
    }
    const double norm = v.norm();
    if (norm > 0.0) v /= norm;
    return v;
}

double semantic_distance(const std::vector<std::string>& responses,
                         const HashNgramEmbedder& embedder) {
    if (responses.size() < 2) {
        throw TooFewResponses("semantic distance needs at least 2 responses");
    }
    std::vector<Eigen::VectorXd> vecs;
    vecs.reserve(responses.size());
    for (const auto& r : responses) vecs.push_back(embedder.embed(r));

    double total = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < vecs.size(); ++i) {
        for (std::size_t j = i + 1; j < vecs.size(); ++j) {
            total += 1.0 - vecs[i].dot(vecs[j]);
            ++pairs;
        }
    }
    return total / static_cast<double>(pairs);
}

} // namespace ruscarl
