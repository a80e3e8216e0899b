#include <doctest.h>

#include <cmath>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "ruscarl/errors.hpp"
#include "ruscarl/metrics.hpp"
#include "ruscarl/rng.hpp"

using namespace ruscarl;

TEST_CASE("identical log-probs give ratio exactly 1") {
    const std::vector<double> lps{-1.3, -0.2, -4.4};
    const auto r = seq_importance_ratio(lps, lps);
    CHECK(r.value == 1.0);
    CHECK_FALSE(r.overflowed);
}

TEST_CASE("uniform shift gives exp of the per-token difference") {
    std::vector<double> old_lps{-1.0, -2.0, -0.5, -3.0};
    std::vector<double> new_lps = old_lps;
    for (double& v : new_lps) v += 0.25;
    const auto r = seq_importance_ratio(new_lps, old_lps);
    CHECK(r.value == doctest::Approx(std::exp(0.25)).epsilon(1e-14));
}

TEST_CASE("padding with an agreed token raises ratio to L/(L+1)") {
    const std::vector<double> old_lps{-2.0, -1.5, -0.7};
    const std::vector<double> new_lps{-1.2, -0.9, -0.4};
    const double base = seq_importance_ratio(new_lps, old_lps).value;

    auto old_pad = old_lps;
    auto new_pad = new_lps;
    old_pad.push_back(-0.33);
    new_pad.push_back(-0.33);
    const double padded = seq_importance_ratio(new_pad, old_pad).value;
    CHECK(padded == doctest::Approx(std::pow(base, 3.0 / 4.0)).epsilon(1e-12));
}

TEST_CASE("exponent is clamped at +-700 with the overflow flag set") {
    const auto hi = seq_importance_ratio({0.0}, {-1e5});
    CHECK(hi.overflowed);
    CHECK(hi.value == doctest::Approx(std::exp(700.0)));

    const auto lo = seq_importance_ratio({-1e5}, {0.0});
    CHECK(lo.overflowed);
    CHECK(lo.value == doctest::Approx(std::exp(-700.0)));

    CHECK_FALSE(seq_importance_ratio({-600.0}, {0.0}).overflowed);
}

TEST_CASE("seq_importance_ratio input validation") {
    CHECK_THROWS_AS(seq_importance_ratio({1.0}, {1.0, 2.0}), LengthMismatch);
    CHECK_THROWS_AS(seq_importance_ratio({}, {}), LengthMismatch);
}

TEST_CASE("novelty_stats on a handmade vector") {
    const std::vector<double> ratios{0.5, 1.0, 2.5, 3.0, 15.0, 120.0};
    const auto stats = novelty_stats(ratios);
    CHECK(stats.mean == doctest::Approx(142.0 / 6).epsilon(1e-14));
    CHECK(stats.median == 2.5);  // lower middle of 6 values
    CHECK(stats.counts[0] == 4);
    CHECK(stats.counts[1] == 2);
    CHECK(stats.counts[2] == 1);
    CHECK_THROWS_AS(novelty_stats({}), EmptyInput);
}

TEST_CASE("novelty_stats reproduces the reference distribution fixture") {
    std::ifstream in(std::string(RUSCARL_FIXTURE_DIR) + "/novelty_ratios.csv");
    REQUIRE(in.good());
    std::vector<double> ratios;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) ratios.push_back(std::stod(line));
    }
    REQUIRE(ratios.size() == 500);

    const auto stats = novelty_stats(ratios);
    CHECK(stats.mean == doctest::Approx(5424.6238).epsilon(1e-7));
    CHECK(stats.median == doctest::Approx(2.1939).epsilon(1e-12));
    CHECK(stats.counts[0] == 321);
    CHECK(stats.counts[1] == 11);
    CHECK(stats.counts[2] == 7);
}

// Independent BLEU implementation for cross-checking: n-grams as joined
// strings, linear-scan clipping, same smoothing and brevity rules.
namespace {

std::vector<std::string> grams_of(const std::vector<int>& seq, int n) {
    std::vector<std::string> out;
    for (int i = 0; i + n <= static_cast<int>(seq.size()); ++i) {
        std::string g;
        for (int k = 0; k < n; ++k) {
            g += std::to_string(seq[static_cast<std::size_t>(i + k)]) + ",";
        }
        out.push_back(g);
    }
    return out;
}

double bleu_oracle(const std::vector<int>& hyp,
                   const std::vector<std::vector<int>>& refs) {
    double log_sum = 0.0;
    int orders = 0;
    for (int n = 1; n <= 4; ++n) {
        const auto hyp_grams = grams_of(hyp, n);
        if (hyp_grams.empty()) continue;
        std::map<std::string, int> hyp_count;
        for (const auto& g : hyp_grams) ++hyp_count[g];
        int matched = 0;
        for (const auto& [g, c] : hyp_count) {
            int best = 0;
            for (const auto& ref : refs) {
                int cnt = 0;
                for (const auto& rg : grams_of(ref, n)) {
                    if (rg == g) ++cnt;
                }
                best = std::max(best, cnt);
            }
            matched += std::min(c, best);
        }
        const double total = static_cast<double>(hyp_grams.size());
        const double prec = matched == 0 ? 1.0 / (total + 1) : matched / total;
        log_sum += std::log(prec);
        ++orders;
    }
    if (orders == 0) return 0.0;

    std::size_t closest = refs.front().size();
    const auto dist = [&](std::size_t a) {
        return a > hyp.size() ? a - hyp.size() : hyp.size() - a;
    };
    for (const auto& ref : refs) {
        if (dist(ref.size()) < dist(closest) ||
            (dist(ref.size()) == dist(closest) && ref.size() < closest)) {
            closest = ref.size();
        }
    }
    double bp = 1.0;
    if (!hyp.empty() && hyp.size() < closest) {
        bp = std::exp(1.0 - static_cast<double>(closest) /
                                static_cast<double>(hyp.size()));
    }
    return bp * std::exp(log_sum / orders);
}

double self_bleu_oracle(const std::vector<std::vector<int>>& responses) {
    double total = 0.0;
    for (std::size_t i = 0; i < responses.size(); ++i) {
        std::vector<std::vector<int>> refs;
        for (std::size_t j = 0; j < responses.size(); ++j) {
            if (j != i) refs.push_back(responses[j]);
        }
        total += bleu_oracle(responses[i], refs);
    }
    return 1.0 - total / static_cast<double>(responses.size());
}

} // namespace

TEST_CASE("self-BLEU diversity matches an independent implementation") {
    Rng rng(404);
    for (int trial = 0; trial < 30; ++trial) {
        const int count = static_cast<int>(rng.next_int(2, 6));
        const int vocab = static_cast<int>(rng.next_int(3, 9));
        std::vector<std::vector<int>> responses;
        for (int i = 0; i < count; ++i) {
            std::vector<int> seq;
            const int len = static_cast<int>(rng.next_int(1, 14));
            for (int t = 0; t < len; ++t) {
                seq.push_back(static_cast<int>(rng.next_below(
                    static_cast<std::uint64_t>(vocab))));
            }
            responses.push_back(std::move(seq));
        }
        CHECK(self_bleu_diversity(responses) ==
              doctest::Approx(self_bleu_oracle(responses)).epsilon(1e-12));
    }
}

TEST_CASE("identical responses have zero diversity") {
    const std::vector<int> seq{1, 2, 3, 4, 5, 6};
    CHECK(self_bleu_diversity({seq, seq, seq}) ==
          doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("token-disjoint long responses approach full diversity") {
    std::vector<int> a, b;
    for (int i = 0; i < 30; ++i) {
        a.push_back(1 + (i % 5));
        b.push_back(10 + (i % 5));
    }
    const double d = self_bleu_diversity({a, b});
    CHECK(d > 0.95);
    CHECK(d <= 1.0);
}

TEST_CASE("self-BLEU requires at least two responses") {
    CHECK_THROWS_AS(self_bleu_diversity({{1, 2, 3}}), TooFewResponses);
    CHECK_THROWS_AS(self_bleu_diversity_text({"1 2 3"}), TooFewResponses);
}

TEST_CASE("text wrapper tokenizes on whitespace") {
    const std::vector<std::vector<int>> toks{{1, 2, 3, 4}, {4, 3, 2, 1}};
    const std::vector<std::string> texts{"1 2 3 4", "4 3 2 1"};
    CHECK(self_bleu_diversity_text(texts) ==
          doctest::Approx(self_bleu_diversity(toks)).epsilon(1e-14));
}

TEST_CASE("embedder produces unit vectors and is deterministic") {
    HashNgramEmbedder embedder;
    const auto v1 = embedder.embed("3 1 4 1 5");
    const auto v2 = embedder.embed("3 1 4 1 5");
    CHECK(v1.size() == 256);
    CHECK(std::abs(v1.norm() - 1.0) < 1e-12);
    CHECK((v1 - v2).cwiseAbs().maxCoeff() == 0.0);
    CHECK(embedder.embed("").norm() == 0.0);
}

TEST_CASE("semantic distance endpoints") {
    HashNgramEmbedder embedder;
    CHECK(semantic_distance({"7 7 7", "7 7 7"}, embedder) ==
          doctest::Approx(0.0).epsilon(1e-12));

    const double d = semantic_distance({"1 2 3", "21 22 23"}, embedder);
    CHECK(d > 0.5);
    CHECK(d <= 2.0);

    CHECK_THROWS_AS(semantic_distance({"1"}, embedder), TooFewResponses);
}

TEST_CASE("semantic distance averages over unordered pairs") {
    HashNgramEmbedder embedder;
    const std::vector<std::string> texts{"1 2", "3 4", "5 6"};
    double manual = 0.0;
    for (int i = 0; i < 3; ++i) {
        for (int j = i + 1; j < 3; ++j) {
            manual += 1.0 - embedder.embed(texts[static_cast<std::size_t>(i)])
                                .dot(embedder.embed(texts[static_cast<std::size_t>(j)]));
        }
    }
    CHECK(semantic_distance(texts, embedder) ==
          doctest::Approx(manual / 3.0).epsilon(1e-12));
}
