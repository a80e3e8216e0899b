#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ruscarl/rubric.hpp"

namespace ruscarl {

struct Judgment {
    bool criteria_met = false;
    std::string explanation;
};

// Raised when a backend cannot produce a judgment after retries. Carries any
// per-criterion results that did complete, for logging.
struct GradingUnavailable : std::runtime_error {
    explicit GradingUnavailable(const std::string& what)
        : std::runtime_error(what) {}
    std::vector<std::optional<Judgment>> partial;
};

struct GraderConfig {
    enum class Kind { Oracle, Mock, Llm };
    Kind kind = Kind::Oracle;
    // llm backend only:
    std::string endpoint;  // e.g. http://127.0.0.1:8080
    std::string model;
    std::string api_key;          // optional bearer token
    int timeout_seconds = 30;
    int max_retries = 2;
    int parallelism = 4;
    std::string transcript_path;  // empty disables transcript logging

    void validate() const;
};

// Extracts the first well-formed JSON object (optionally inside a fenced code
// block) carrying a boolean criteria_met. Throws ParseFailure when no object
// exists, TypeMismatch when criteria_met is not boolean.
Judgment parse_judgment(const std::string& raw);

// Per-criterion binary judge. Implementations must be safely shareable across
// concurrent grade calls.
class Grader {
public:
    virtual ~Grader() = default;
    virtual Judgment grade_criterion(const RubricTask& task,
                                     const std::string& response,
                                     const Criterion& criterion) = 0;
    virtual int parallelism() const { return 1; }
};

// Deterministic grading against the criteria's synthetic check descriptors.
class OracleGrader : public Grader {
public:
    Judgment grade_criterion(const RubricTask& task, const std::string& response,
                             const Criterion& criterion) override;
};

// Playback grader keyed on (task_id, criterion id).
class MockGrader : public Grader {
public:
    void record(const std::string& task_id, const std::string& criterion_id,
                bool met);
    Judgment grade_criterion(const RubricTask& task, const std::string& response,
                             const Criterion& criterion) override;

private:
    std::map<std::pair<std::string, std::string>, bool> table_;
};

// LLM-as-a-Judge over a chat-completion HTTP endpoint. Judge requests use
// temperature 0; every call is appended to a replayable transcript.
class LlmGrader : public Grader {
public:
    explicit LlmGrader(GraderConfig config);
    Judgment grade_criterion(const RubricTask& task, const std::string& response,
                             const Criterion& criterion) override;
    int parallelism() const override { return config_.parallelism; }

private:
    std::string complete(const std::string& prompt);
    void log_transcript(const std::string& prompt, const std::string& raw,
                        const std::optional<Judgment>& parsed);

    GraderConfig config_;
    std::mutex transcript_mutex_;
};

std::unique_ptr<Grader> make_grader(const GraderConfig& config);

// Grades every criterion of the task's rubric; result order follows criterion
// position. Per-criterion calls fan out concurrently up to the backend's
// parallelism limit.
JudgmentVector grade_rubric(Grader& grader, const RubricTask& task,
                            const std::string& response);

} // namespace ruscarl
