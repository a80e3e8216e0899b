#include "ruscarl/checks.hpp"

#include <algorithm>

#include "ruscarl/errors.hpp"

namespace ruscarl {

bool SyntheticCheck::eval(std::span<const int> tokens) const {
    switch (kind) {
        case Kind::ContainsToken:
        case Kind::AvoidToken:
            return std::find(tokens.begin(), tokens.end(), a) != tokens.end();
        case Kind::OrderedPair: {
            auto first_b = std::find(tokens.begin(), tokens.end(), b);
            auto first_a = std::find(tokens.begin(), first_b, a);
            return first_a != first_b;
        }
        case Kind::LengthAtLeast:
            return static_cast<int>(tokens.size()) >= a;
        case Kind::LengthAtMost:
            return static_cast<int>(tokens.size()) <= a;
        case Kind::StartsWith:
            return !tokens.empty() && tokens.front() == a;
    }
    return false;
}

std::string SyntheticCheck::describe() const {
    switch (kind) {
        case Kind::ContainsToken:
            return "The response mentions token " + std::to_string(a) + ".";
        case Kind::AvoidToken:
            return "The response mentions token " + std::to_string(a) + ".";
        case Kind::OrderedPair:
            return "The response mentions token " + std::to_string(a) +
                   " before the first occurrence of token " + std::to_string(b) + ".";
        case Kind::LengthAtLeast:
            return "The response contains at least " + std::to_string(a) + " tokens.";
        case Kind::LengthAtMost:
            return "The response contains at most " + std::to_string(a) + " tokens.";
        case Kind::StartsWith:
            return "The response starts with token " + std::to_string(a) + ".";
    }
    return {};
}

std::string SyntheticCheck::kind_name() const {
    switch (kind) {
        case Kind::ContainsToken: return "contains_token";
        case Kind::AvoidToken: return "avoid_token";
        case Kind::OrderedPair: return "ordered_pair";
        case Kind::LengthAtLeast: return "length_at_least";
        case Kind::LengthAtMost: return "length_at_most";
        case Kind::StartsWith: return "starts_with";
    }
    return {};
}

SyntheticCheck SyntheticCheck::from_parts(const std::string& name, int a, int b) {
    SyntheticCheck c;
    c.a = a;
    c.b = b;
    if (name == "contains_token") c.kind = Kind::ContainsToken;
    else if (name == "avoid_token") c.kind = Kind::AvoidToken;
    else if (name == "ordered_pair") c.kind = Kind::OrderedPair;
    else if (name == "length_at_least") c.kind = Kind::LengthAtLeast;
    else if (name == "length_at_most") c.kind = Kind::LengthAtMost;
    else if (name == "starts_with") c.kind = Kind::StartsWith;
    else throw BadSpec("unknown check kind: " + name);
    return c;
}

} // namespace ruscarl
