#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "ruscarl/errors.hpp"
#include "ruscarl/rng.hpp"
#include "ruscarl/rubric.hpp"

namespace ruscarl {

// Group-level differentiation pattern: either a linearly decreasing ratio per
// sample, or the first N samples fully scaffolded and the rest bare.
struct IntraGroupMode {
    enum class Kind { Linear, Binary };
    Kind kind = Kind::Linear;
    int binary_n = 0;  // count of fully scaffolded samples (Binary only)

    static IntraGroupMode linear() { return {Kind::Linear, 0}; }
    static IntraGroupMode binary(int n) { return {Kind::Binary, n}; }
};

// Time decay of the scaffolding multiplier over normalized training progress.
struct DecayFamily {
    enum class Kind { Sigmoid, Constant, LinearDecay, Power };
    Kind kind = Kind::Sigmoid;
    double alpha = 125.0;  // sigmoid steepness
    double t0 = 0.2;       // sigmoid midpoint in [0,1]
    double power_n = 1.0;  // power-decay exponent

    static DecayFamily sigmoid(double alpha, double t0) {
        DecayFamily d;
        d.kind = Kind::Sigmoid;
        d.alpha = alpha;
        d.t0 = t0;
        return d;
    }
    static DecayFamily constant() {
        DecayFamily d;
        d.kind = Kind::Constant;
        return d;
    }
    static DecayFamily linear() {
        DecayFamily d;
        d.kind = Kind::LinearDecay;
        return d;
    }
    static DecayFamily power(double n) {
        DecayFamily d;
        d.kind = Kind::Power;
        d.power_n = n;
        return d;
    }

    void validate() const {
        if (kind == Kind::Sigmoid && !(alpha > 0.0)) {
            throw BadConfig("sigmoid decay requires alpha > 0");
        }
        if (kind == Kind::Sigmoid && !(t0 >= 0.0 && t0 <= 1.0)) {
            throw BadConfig("sigmoid midpoint t0 must lie in [0,1]");
        }
        if (kind == Kind::Power && !(power_n > 0.0)) {
            throw BadConfig("power decay requires n > 0");
        }
    }
};

struct ScaffoldConfig {
    IntraGroupMode intra;
    DecayFamily decay;
    // Additive logit bias per hinted token when the toy policy consumes the
    // scaffold subset.
    double guidance_strength = 2.0;
};

// Per-sample scaffolding outcome: the integrated ratio and the sampled rubric
// subset.
struct ScaffoldAssignment {
    double ratio = 0.0;
    std::vector<Criterion> subset;
};

// lambda_i = (G - i) / (G - 1) for the i-th of G samples (1-based); Binary(N)
// puts 1 on the first N entries. G = 1 Linear is defined as [1].
inline std::vector<double> group_ratios(int group_size, const IntraGroupMode& mode) {
    if (group_size < 1) throw BadConfig("group size must be >= 1");
    std::vector<double> ratios(static_cast<std::size_t>(group_size), 0.0);
    if (mode.kind == IntraGroupMode::Kind::Linear) {
        if (group_size == 1) {
            ratios[0] = 1.0;
        } else {
            for (int i = 1; i <= group_size; ++i) {
                ratios[static_cast<std::size_t>(i - 1)] =
                    static_cast<double>(group_size - i) /
                    static_cast<double>(group_size - 1);
            }
        }
    } else {
        if (mode.binary_n < 0 || mode.binary_n > group_size) {
            throw BadConfig("Binary(N) requires 0 <= N <= G");
        }
        for (int i = 0; i < mode.binary_n; ++i) {
            ratios[static_cast<std::size_t>(i)] = 1.0;
        }
    }
    return ratios;
}

// Decay multiplier at progress t in [0,1].
inline double step_ratio(double t, const DecayFamily& decay) {
    decay.validate();
    switch (decay.kind) {
        case DecayFamily::Kind::Sigmoid:
            return 1.0 / (1.0 + std::exp(decay.alpha * (t - decay.t0)));
        case DecayFamily::Kind::Constant:
            return 1.0;
        case DecayFamily::Kind::LinearDecay:
            return 1.0 - t;
        case DecayFamily::Kind::Power:
            return std::pow(1.0 - t, decay.power_n);
    }
    return 0.0;
}

// Elementwise product of the decay multiplier and the group ratio vector.
inline std::vector<double> integrated_ratios(double t, int group_size,
                                             const ScaffoldConfig& config) {
    std::vector<double> ratios = group_ratios(group_size, config.intra);
    const double step = step_ratio(t, config.decay);
    for (double& r : ratios) r *= step;
    return ratios;
}

// round(x) half away from zero.
inline int round_half_away(double x) {
    return static_cast<int>(x >= 0.0 ? std::floor(x + 0.5) : std::ceil(x - 0.5));
}

// Uniformly samples round(lambda * N) distinct criteria without replacement
// from the full rubric (positive and negative points alike). lambda = 1
// returns all criteria in rubric order.
inline std::vector<Criterion> sample_subset(const Rubric& rubric, double lambda,
                                            Rng& rng) {
    const std::size_t n = rubric.criteria.size();
    const int want = round_half_away(lambda * static_cast<double>(n));
    if (want <= 0) return {};
    if (static_cast<std::size_t>(want) >= n) return rubric.criteria;

    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    // Partial Fisher-Yates: first `want` positions are the sample.
    for (int k = 0; k < want; ++k) {
        std::size_t j = static_cast<std::size_t>(k) +
                        static_cast<std::size_t>(rng.next_below(n - static_cast<std::size_t>(k)));
        std::swap(idx[static_cast<std::size_t>(k)], idx[j]);
    }
    std::vector<Criterion> subset;
    subset.reserve(static_cast<std::size_t>(want));
    for (int k = 0; k < want; ++k) {
        subset.push_back(rubric.criteria[idx[static_cast<std::size_t>(k)]]);
    }
    return subset;
}

} // namespace ruscarl
