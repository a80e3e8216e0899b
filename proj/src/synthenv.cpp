#include "ruscarl/synthenv.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <string>

#include "ruscarl/errors.hpp"
#include "ruscarl/rng.hpp"

namespace ruscarl {

void SynthTaskSpec::validate() const {
    if (task_count < 1) throw BadSpec("task_count must be >= 1");
    if (vocab_size < 4) throw BadSpec("vocab_size must be >= 4");
    if (min_criteria < 1 || max_criteria < min_criteria) {
        throw BadSpec("bad criteria-per-task range");
    }
    if (negative_fraction < 0.0 || negative_fraction > 1.0) {
        throw BadSpec("negative_fraction must lie in [0,1]");
    }
    if (pos_points_min < 1 || pos_points_max < pos_points_min) {
        throw BadSpec("bad positive point range");
    }
    if (neg_points_max > -1 || neg_points_min > neg_points_max) {
        throw BadSpec("bad negative point range");
    }
    if (max_length < 6) throw BadSpec("max_length must be >= 6");
}

namespace {

// Distinct content tokens (EOS excluded) sampled without replacement.
std::vector<int> sample_distinct_tokens(int count, int vocab_size, Rng& rng,
                                        const std::set<int>& excluded) {
    std::vector<int> pool;
    for (int t = 1; t < vocab_size; ++t) {
        if (!excluded.count(t)) pool.push_back(t);
    }
    shuffle_in_place(pool, rng);
    pool.resize(static_cast<std::size_t>(std::min<int>(count, static_cast<int>(pool.size()))));
    return pool;
}

std::size_t first_index_of(const std::vector<int>& seq, int tok) {
    return static_cast<std::size_t>(
        std::find(seq.begin(), seq.end(), tok) - seq.begin());
}

struct DraftCriteria {
    std::vector<SyntheticCheck> positive;
    std::vector<SyntheticCheck> negative;
    std::vector<int> witness;
};

bool draft_task(const SynthTaskSpec& spec, Rng& rng, DraftCriteria& out) {
    const int n_criteria =
        static_cast<int>(rng.next_int(spec.min_criteria, spec.max_criteria));
    int n_neg = static_cast<int>(
        std::lround(spec.negative_fraction * static_cast<double>(n_criteria)));
    n_neg = std::min(n_neg, n_criteria - 1);
    const int n_pos = n_criteria - n_neg;

    std::set<int> forbidden;
    for (int t : sample_distinct_tokens(n_neg, spec.vocab_size, rng, {})) {
        forbidden.insert(t);
    }
    if (static_cast<int>(forbidden.size()) < n_neg) return false;

    const int wit_len =
        static_cast<int>(rng.next_int(4, std::max(4, spec.max_length - 2)));
    std::vector<int> allowed = sample_distinct_tokens(
        spec.vocab_size, spec.vocab_size, rng, forbidden);
    if (allowed.empty()) return false;

    std::vector<int> witness;
    for (int i = 0; i < wit_len; ++i) {
        witness.push_back(
            allowed[static_cast<std::size_t>(rng.next_below(allowed.size()))]);
    }

    // Positive checks are read off the witness, so joint satisfiability holds
    // by construction; duplicates force a retry of the whole draft.
    std::set<std::string> seen;
    out.positive.clear();
    bool used_starts_with = false;
    for (int k = 0; k < n_pos; ++k) {
        SyntheticCheck chk;
        bool ok = false;
        for (int attempt = 0; attempt < 24 && !ok; ++attempt) {
            const int kind = static_cast<int>(rng.next_below(5));
            switch (kind) {
                case 0: {
                    chk.kind = SyntheticCheck::Kind::ContainsToken;
                    chk.a = witness[static_cast<std::size_t>(
                        rng.next_below(witness.size()))];
                    chk.b = 0;
                    ok = true;
                    break;
                }
                case 1: {
                    chk.kind = SyntheticCheck::Kind::OrderedPair;
                    const int u = witness[static_cast<std::size_t>(
                        rng.next_below(witness.size()))];
                    const int v = witness[static_cast<std::size_t>(
                        rng.next_below(witness.size()))];
                    if (u == v) break;
                    if (first_index_of(witness, u) < first_index_of(witness, v)) {
                        chk.a = u;
                        chk.b = v;
                    } else {
                        chk.a = v;
                        chk.b = u;
                    }
                    ok = true;
                    break;
                }
                case 2: {
                    chk.kind = SyntheticCheck::Kind::LengthAtLeast;
                    chk.a = static_cast<int>(
                        rng.next_int(std::max(1, wit_len - 3), wit_len));
                    chk.b = 0;
                    ok = true;
                    break;
                }
                case 3: {
                    chk.kind = SyntheticCheck::Kind::LengthAtMost;
                    chk.a = static_cast<int>(rng.next_int(wit_len, spec.max_length));
                    chk.b = 0;
                    ok = true;
                    break;
                }
                case 4: {
                    if (used_starts_with) break;
                    chk.kind = SyntheticCheck::Kind::StartsWith;
                    chk.a = witness.front();
                    chk.b = 0;
                    ok = true;
                    break;
                }
            }
            if (ok && !seen.insert(chk.describe()).second) ok = false;
        }
        if (!ok) return false;
        if (chk.kind == SyntheticCheck::Kind::StartsWith) used_starts_with = true;
        out.positive.push_back(chk);
    }

    out.negative.clear();
    for (int t : forbidden) {
        SyntheticCheck chk;
        chk.kind = SyntheticCheck::Kind::AvoidToken;
        chk.a = t;
        out.negative.push_back(chk);
    }
    out.witness = witness;

    // Witness verification: full credit requires every positive check met and
    // every negative check unmet.
    for (const auto& c : out.positive) {
        if (!c.eval(out.witness)) return false;
    }
    for (const auto& c : out.negative) {
        if (c.eval(out.witness)) return false;
    }
    return true;
}

} // namespace

std::vector<RubricTask> generate_tasks(const SynthTaskSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    std::vector<RubricTask> tasks;
    tasks.reserve(static_cast<std::size_t>(spec.task_count));

    for (int i = 0; i < spec.task_count; ++i) {
        DraftCriteria draft;
        int guard = 0;
        while (!draft_task(spec, rng, draft)) {
            if (++guard > 1000) throw BadSpec("could not draft a satisfiable task");
        }

        RubricTask task;
        char idbuf[32];
        std::snprintf(idbuf, sizeof(idbuf), "synth-%04d", i);
        task.task_id = idbuf;
        task.conversation.push_back(
            {"user",
             "Task " + task.task_id + ": reply with a sequence of integers between 1 and " +
                 std::to_string(spec.vocab_size - 1) + ", separated by spaces, at most " +
                 std::to_string(spec.max_length) + " tokens long."});

        std::vector<std::pair<SyntheticCheck, bool>> all;  // (check, positive?)
        for (const auto& c : draft.positive) all.emplace_back(c, true);
        for (const auto& c : draft.negative) all.emplace_back(c, false);
        shuffle_in_place(all, rng);

        int cid = 0;
        for (const auto& [chk, positive] : all) {
            Criterion crit;
            crit.id = "c" + std::to_string(++cid);
            crit.text = chk.describe();
            crit.check = chk;
            crit.points = positive
                              ? static_cast<double>(rng.next_int(spec.pos_points_min,
                                                                 spec.pos_points_max))
                              : static_cast<double>(rng.next_int(spec.neg_points_min,
                                                                 spec.neg_points_max));
            task.rubric.criteria.push_back(std::move(crit));
        }
        task.witness = draft.witness;
        validate_task(task);
        tasks.push_back(std::move(task));
    }
    return tasks;
}

} // namespace ruscarl
