#include "ruscarl/policy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "ruscarl/errors.hpp"

namespace ruscarl {

using nlohmann::json;

std::string TokenSeq::to_text() const {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += ' ';
        out += std::to_string(tokens[i]);
    }
    return out;
}

TokenSeq TokenSeq::from_text(const std::string& text) {
    TokenSeq seq;
    std::istringstream in(text);
    int tok;
    while (in >> tok) seq.tokens.push_back(tok);
    seq.terminated = true;
    return seq;
}

void SamplingConfig::validate() const {
    if (!(temperature > 0.0)) throw BadConfig("temperature must be > 0");
    if (!(top_p > 0.0 && top_p <= 1.0)) throw BadConfig("top_p must be in (0,1]");
    if (top_k < 1) throw BadConfig("top_k must be >= 1");
    if (max_length < 1) throw BadConfig("max_length must be >= 1");
}

Eigen::VectorXd PolicyParams::logits_at(const std::string& ctx, int prev) const {
    auto it = tables_.find(ctx);
    if (it == tables_.end()) return Eigen::VectorXd::Zero(vocab_size_);
    return it->second.row(prev + 1).transpose();
}

Eigen::MatrixXd& PolicyParams::context_table(const std::string& ctx) {
    auto it = tables_.find(ctx);
    if (it == tables_.end()) {
        it = tables_.emplace(ctx, Eigen::MatrixXd::Zero(vocab_size_ + 1, vocab_size_))
                 .first;
    }
    return it->second;
}

void PolicyParams::save(const std::string& path) const {
    json doc;
    doc["format"] = "ruscarl-policy";
    doc["version"] = 1;
    doc["vocab_size"] = vocab_size_;
    doc["max_length"] = max_length_;
    json ctxs = json::object();
    for (const auto& [name, table] : tables_) {
        json rows = json::array();
        for (Eigen::Index r = 0; r < table.rows(); ++r) {
            json row = json::array();
            for (Eigen::Index c = 0; c < table.cols(); ++c) {
                row.push_back(table(r, c));
            }
            rows.push_back(std::move(row));
        }
        ctxs[name] = std::move(rows);
    }
    doc["contexts"] = std::move(ctxs);
    std::ofstream out(path);
    if (!out) throw BadConfig("cannot write checkpoint: " + path);
    out << doc.dump() << "\n";
}

PolicyParams PolicyParams::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BadConfig("cannot read checkpoint: " + path);
    json doc = json::parse(in);
    if (doc.value("format", "") != "ruscarl-policy" || doc.value("version", 0) != 1) {
        throw BadConfig("unrecognized checkpoint format: " + path);
    }
    PolicyParams params(doc.at("vocab_size").get<int>(),
                        doc.at("max_length").get<int>());
    for (auto& [name, rows] : doc.at("contexts").items()) {
        Eigen::MatrixXd& table = params.context_table(name);
        if (static_cast<Eigen::Index>(rows.size()) != table.rows()) {
            throw BadConfig("checkpoint table shape mismatch for context " + name);
        }
        for (Eigen::Index r = 0; r < table.rows(); ++r) {
            const auto& row = rows[static_cast<std::size_t>(r)];
            for (Eigen::Index c = 0; c < table.cols(); ++c) {
                table(r, c) = row[static_cast<std::size_t>(c)].get<double>();
            }
        }
    }
    return params;
}

void apply_gradient(PolicyParams& params, const GradTable& grad, double scale) {
    for (const auto& [ctx, g] : grad) {
        params.context_table(ctx) += scale * g;
    }
}

GuidanceBias GuidanceBias::from_subset(const std::vector<Criterion>& subset,
                                       double strength, int vocab_size) {
    GuidanceBias bias;
    bias.strength_ = strength;
    bias.vocab_size_ = vocab_size;
    for (const auto& c : subset) {
        if (!c.check) continue;  // free-text criteria carry no token hints
        bias.directives_.push_back({*c.check, c.points > 0.0});
    }
    return bias;
}

Eigen::VectorXd GuidanceBias::bias_at(std::span<const int> prefix) const {
    Eigen::VectorXd bias = Eigen::VectorXd::Zero(vocab_size_);
    if (directives_.empty() || strength_ == 0.0) return bias;

    auto contains = [&](int tok) {
        return std::find(prefix.begin(), prefix.end(), tok) != prefix.end();
    };

    for (const auto& d : directives_) {
        const double sign = d.desirable ? 1.0 : -1.0;
        const auto& chk = d.check;
        switch (chk.kind) {
            case SyntheticCheck::Kind::ContainsToken:
            case SyntheticCheck::Kind::AvoidToken:
                if (!contains(chk.a) || sign < 0.0) {
                    bias[chk.a] += sign * strength_;
                }
                break;
            case SyntheticCheck::Kind::OrderedPair:
                if (!contains(chk.a)) {
                    bias[chk.a] += sign * strength_;
                    bias[chk.b] -= sign * strength_;
                }
                break;
            case SyntheticCheck::Kind::LengthAtLeast:
                if (static_cast<int>(prefix.size()) < chk.a) {
                    bias[kEosToken] -= sign * strength_;
                }
                break;
            case SyntheticCheck::Kind::LengthAtMost:
                if (static_cast<int>(prefix.size()) >= chk.a) {
                    bias[kEosToken] += sign * strength_;
                }
                break;
            case SyntheticCheck::Kind::StartsWith:
                if (prefix.empty()) {
                    bias[chk.a] += sign * strength_;
                }
                break;
        }
    }
    return bias;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& logits) {
    const double m = logits.maxCoeff();
    Eigen::VectorXd p = (logits.array() - m).exp();
    return p / p.sum();
}

namespace {

// Truncation order: temperature, then top-k, then top-p, then renormalize.
// Ties in probability break toward the lower token index.
int sample_token(const Eigen::VectorXd& logits, const SamplingConfig& cfg,
                 Rng& rng) {
    const Eigen::Index v = logits.size();
    Eigen::VectorXd probs = softmax(logits / cfg.temperature);

    std::vector<int> order(static_cast<std::size_t>(v));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return probs[a] > probs[b]; });

    const std::size_t keep_k =
        std::min<std::size_t>(order.size(), static_cast<std::size_t>(cfg.top_k));
    double kept_mass = 0.0;
    std::size_t keep = 0;
    while (keep < keep_k) {
        kept_mass += probs[order[keep]];
        ++keep;
        if (kept_mass >= cfg.top_p - 1e-12) break;
    }

    const double u = rng.next_double() * kept_mass;
    double acc = 0.0;
    for (std::size_t i = 0; i < keep; ++i) {
        acc += probs[order[i]];
        if (u < acc) return order[i];
    }
    return order[keep - 1];
}

} // namespace

TokenSeq sample_response(const PolicyParams& params, const std::string& ctx,
                         const GuidanceBias& bias, const SamplingConfig& cfg,
                         Rng& rng) {
    cfg.validate();
    TokenSeq seq;
    int prev = -1;
    while (static_cast<int>(seq.tokens.size()) < cfg.max_length) {
        Eigen::VectorXd logits = params.logits_at(ctx, prev);
        if (!bias.empty()) {
            logits += bias.bias_at(seq.tokens);
        }
        const int tok = sample_token(logits, cfg, rng);
        if (tok == kEosToken) {
            seq.terminated = true;
            break;
        }
        seq.tokens.push_back(tok);
        prev = tok;
    }
    return seq;
}

std::vector<double> log_prob(const PolicyParams& params, const std::string& ctx,
                             const TokenSeq& seq) {
    std::vector<double> out;
    out.reserve(seq.tokens.size());
    int prev = -1;
    for (int tok : seq.tokens) {
        Eigen::VectorXd logits = params.logits_at(ctx, prev);
        const double m = logits.maxCoeff();
        const double lse = m + std::log((logits.array() - m).exp().sum());
        out.push_back(logits[tok] - lse);
        prev = tok;
    }
    return out;
}

double sum_log_prob(const PolicyParams& params, const std::string& ctx,
                    const TokenSeq& seq) {
    const auto lps = log_prob(params, ctx, seq);
    return std::accumulate(lps.begin(), lps.end(), 0.0);
}

double token_entropy(const PolicyParams& params, const std::string& ctx,
                     std::span<const int> prefix) {
    const int prev = prefix.empty() ? -1 : prefix.back();
    Eigen::VectorXd p = softmax(params.logits_at(ctx, prev));
    double h = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) h -= p[i] * std::log(p[i]);
    }
    return h;
}

double mean_trajectory_entropy(
    const PolicyParams& params,
    const std::vector<std::pair<std::string, TokenSeq>>& seqs) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& [ctx, seq] : seqs) {
        for (std::size_t t = 0; t < seq.tokens.size(); ++t) {
            sum += token_entropy(params, ctx,
                                 std::span<const int>(seq.tokens.data(), t));
            ++count;
        }
    }
    return count ? sum / static_cast<double>(count) : 0.0;
}

void add_logprob_grad_term(const PolicyParams& params, const std::string& ctx,
                           int prev, int token, double coeff, GradTable& grad) {
    auto it = grad.find(ctx);
    if (it == grad.end()) {
        it = grad.emplace(ctx, Eigen::MatrixXd::Zero(params.vocab_size() + 1,
                                                     params.vocab_size()))
                 .first;
    }
    Eigen::VectorXd p = softmax(params.logits_at(ctx, prev));
    it->second.row(prev + 1) -= coeff * p.transpose();
    it->second(prev + 1, token) += coeff;
}

GradTable logprob_gradient(const PolicyParams& params, const std::string& ctx,
                           const TokenSeq& seq) {
    GradTable grad;
    int prev = -1;
    for (int tok : seq.tokens) {
        add_logprob_grad_term(params, ctx, prev, tok, 1.0, grad);
        prev = tok;
    }
    return grad;
}

} // namespace ruscarl
