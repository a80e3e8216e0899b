#pragma once

#include <stdexcept>
#include <string>

namespace ruscarl {

struct RubricInvalid : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct LengthMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ParseFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TypeMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct OracleUnsupported : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BadConfig : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SubsetNotInRubric : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BadGroup : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonFiniteLoss : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptyInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TooFewResponses : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmbedderUnavailable : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct BadSpec : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace ruscarl
