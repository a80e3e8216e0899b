#include "ruscarl/grader.hpp"

#include <atomic>
#include <cstdint>
#include <fstream>
#include <future>
#include <thread>

#include <json.hpp>

#include "ruscarl/errors.hpp"
#include "ruscarl/policy.hpp"
#include "ruscarl/prompts.hpp"
#include "ruscarl/synthenv.hpp"

// Included after Eigen: the system resolver header that cpp-httplib pulls in
// defines a `_res` macro that clashes with Eigen internals.
#define CPPHTTPLIB_NO_EXCEPTIONS
#include <httplib.h>

namespace ruscarl {

using nlohmann::json;

void GraderConfig::validate() const {
    if (parallelism < 1) throw BadConfig("grader parallelism must be >= 1");
    if (max_retries < 0) throw BadConfig("grader retries must be >= 0");
    if (kind == Kind::Llm && endpoint.empty()) {
        throw BadConfig("llm grader requires an endpoint");
    }
}

Judgment parse_judgment(const std::string& raw) {
    // Scan for balanced candidate objects; fenced code blocks fall out of
    // this naturally.
    for (std::size_t start = raw.find('{'); start != std::string::npos;
         start = raw.find('{', start + 1)) {
        int depth = 0;
        bool in_string = false;
        bool escaped = false;
        for (std::size_t i = start; i < raw.size(); ++i) {
            const char c = raw[i];
            if (in_string) {
                if (escaped) escaped = false;
                else if (c == '\\') escaped = true;
                else if (c == '"') in_string = false;
                continue;
            }
            if (c == '"') in_string = true;
            else if (c == '{') ++depth;
            else if (c == '}') {
                if (--depth == 0) {
                    json obj = json::parse(raw.substr(start, i - start + 1),
                                           nullptr, false);
                    if (obj.is_object() && obj.contains("criteria_met")) {
                        if (!obj["criteria_met"].is_boolean()) {
                            throw TypeMismatch("criteria_met is not boolean");
                        }
                        Judgment j;
                        j.criteria_met = obj["criteria_met"].get<bool>();
                        if (obj.contains("explanation") &&
                            obj["explanation"].is_string()) {
                            j.explanation = obj["explanation"].get<std::string>();
                        }
                        return j;
                    }
                    break;  // balanced but not the judge object; keep scanning
                }
            }
        }
    }
    throw ParseFailure("no judgment object found in grader output");
}

Judgment OracleGrader::grade_criterion(const RubricTask&,
                                       const std::string& response,
                                       const Criterion& criterion) {
    if (!criterion.check) {
        throw OracleUnsupported("criterion '" + criterion.id +
                                "' carries no synthetic check");
    }
    const TokenSeq seq = TokenSeq::from_text(response);
    Judgment j;
    j.criteria_met = oracle_check(seq, *criterion.check);
    j.explanation = j.criteria_met ? "check satisfied by the response tokens"
                                   : "check not satisfied by the response tokens";
    return j;
}

void MockGrader::record(const std::string& task_id,
                        const std::string& criterion_id, bool met) {
    table_[{task_id, criterion_id}] = met;
}

Judgment MockGrader::grade_criterion(const RubricTask& task, const std::string&,
                                     const Criterion& criterion) {
    auto it = table_.find({task.task_id, criterion.id});
    if (it == table_.end()) {
        GradingUnavailable err("mock grader has no entry for (" + task.task_id +
                               ", " + criterion.id + ")");
        throw err;
    }
    Judgment j;
    j.criteria_met = it->second;
    j.explanation = "recorded judgment";
    return j;
}

LlmGrader::LlmGrader(GraderConfig config) : config_(std::move(config)) {
    config_.validate();
}

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace

std::string LlmGrader::complete(const std::string& prompt) {
    httplib::Client client(config_.endpoint);
    client.set_connection_timeout(config_.timeout_seconds);
    client.set_read_timeout(config_.timeout_seconds);
    if (!config_.api_key.empty()) {
        client.set_bearer_token_auth(config_.api_key);
    }

    json body;
    body["model"] = config_.model;
    body["temperature"] = 0;
    body["messages"] = json::array({{{"role", "user"}, {"content", prompt}}});

    auto res = client.Post("/v1/chat/completions", body.dump(),
                           "application/json");
    if (!res || res->status != 200) {
        throw GradingUnavailable("judge endpoint error: " +
                                 (res ? std::to_string(res->status)
                                      : httplib::to_string(res.error())));
    }
    json reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded()) {
        throw GradingUnavailable("judge endpoint returned invalid JSON");
    }
    return reply.at("choices").at(0).at("message").at("content")
        .get<std::string>();
}

void LlmGrader::log_transcript(const std::string& prompt, const std::string& raw,
                               const std::optional<Judgment>& parsed) {
    if (config_.transcript_path.empty()) return;
    json rec;
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(fnv1a(prompt)));
    rec["prompt_hash"] = hash;
    rec["raw_response"] = raw;
    if (parsed) {
        rec["parsed"] = {{"criteria_met", parsed->criteria_met},
                         {"explanation", parsed->explanation}};
    } else {
        rec["parsed"] = nullptr;
    }
    std::lock_guard<std::mutex> lock(transcript_mutex_);
    std::ofstream out(config_.transcript_path, std::ios::app);
    out << rec.dump() << "\n";
}

Judgment LlmGrader::grade_criterion(const RubricTask& task,
                                    const std::string& response,
                                    const Criterion& criterion) {
    const std::string prompt = render_judge_prompt(task, response, criterion);
    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        std::string raw;
        try {
            raw = complete(prompt);
        } catch (const GradingUnavailable& e) {
            last_error = e.what();
            continue;
        }
        try {
            Judgment j = parse_judgment(raw);
            log_transcript(prompt, raw, j);
            return j;
        } catch (const std::exception& e) {
            last_error = e.what();
            log_transcript(prompt, raw, std::nullopt);
        }
    }
    throw GradingUnavailable("judge failed after " +
                             std::to_string(config_.max_retries + 1) +
                             " attempts: " + last_error);
}

std::unique_ptr<Grader> make_grader(const GraderConfig& config) {
    config.validate();
    switch (config.kind) {
        case GraderConfig::Kind::Oracle:
            return std::make_unique<OracleGrader>();
        case GraderConfig::Kind::Mock:
            return std::make_unique<MockGrader>();
        case GraderConfig::Kind::Llm:
            return std::make_unique<LlmGrader>(config);
    }
    throw BadConfig("unknown grader kind");
}

JudgmentVector grade_rubric(Grader& grader, const RubricTask& task,
                            const std::string& response) {
    const std::size_t n = task.rubric.criteria.size();
    std::vector<std::optional<Judgment>> results(n);
    std::vector<std::string> errors(n);

    const int limit = std::max(1, grader.parallelism());
    if (limit == 1) {
        for (std::size_t i = 0; i < n; ++i) {
            try {
                results[i] = grader.grade_criterion(task, response,
                                                    task.rubric.criteria[i]);
            } catch (const GradingUnavailable& e) {
                errors[i] = e.what();
            }
        }
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    results[i] = grader.grade_criterion(task, response,
                                                        task.rubric.criteria[i]);
                } catch (const std::exception& e) {
                    errors[i] = e.what();
                }
            }
        };
        std::vector<std::thread> threads;
        const int nthreads = std::min<int>(limit, static_cast<int>(n));
        threads.reserve(static_cast<std::size_t>(nthreads));
        for (int t = 0; t < nthreads; ++t) threads.emplace_back(worker);
        for (auto& t : threads) t.join();
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (!results[i]) {
            GradingUnavailable err("criterion '" + task.rubric.criteria[i].id +
                                   "' of task '" + task.task_id +
                                   "': " + errors[i]);
            err.partial = std::move(results);
            throw err;
        }
    }

    JudgmentVector out;
    out.met.reserve(n);
    out.explanations.reserve(n);
    for (const auto& r : results) {
        out.met.push_back(r->criteria_met);
        out.explanations.push_back(r->explanation);
    }
    return out;
}

} // namespace ruscarl
