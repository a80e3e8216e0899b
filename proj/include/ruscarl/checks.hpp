#pragma once

#include <cstdint>
#include <span>
#include <string>

namespace ruscarl {

// Machine-checkable criterion semantics over token sequences. A check
// describes a behavior; whether that behavior is desirable is carried by the
// sign of the owning criterion's points, not by the check itself.
struct SyntheticCheck {
    enum class Kind {
        ContainsToken,  // token a occurs anywhere
        AvoidToken,     // token a occurs anywhere (used with negative points)
        OrderedPair,    // token a occurs before the first occurrence of b
        LengthAtLeast,  // |seq| >= a
        LengthAtMost,   // |seq| <= a
        StartsWith,     // first token is a
    };

    Kind kind = Kind::ContainsToken;
    int a = 0;
    int b = 0;

    // Reports whether the described behavior occurred. Total and deterministic.
    bool eval(std::span<const int> tokens) const;

    // Natural-language rendering of the check, used as criterion text so the
    // same rubric can be graded by the oracle or by an LLM judge.
    std::string describe() const;

    std::string kind_name() const;
    static SyntheticCheck from_parts(const std::string& kind_name, int a, int b);

    bool operator==(const SyntheticCheck&) const = default;
};

} // namespace ruscarl
