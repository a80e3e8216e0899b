#pragma once

#include <map>
#include <string>

#include "ruscarl/grader.hpp"
#include "ruscarl/trainer.hpp"

namespace ruscarl {

// Fully resolved run configuration: one place for every hyperparameter.
// Precedence when building: config file < environment < command-line flags.
struct RunConfig {
    TrainConfig train;
    GraderConfig grader;
    std::string dataset_path;
    std::string out_dir = "runs/out";

    // Appendix-style "paper" profile or the default "desk" profile.
    static RunConfig profile(const std::string& name);

    static RunConfig from_file(const std::string& path);
    void apply_json(const std::string& json_text);

    // Reads RUSCARL_ENDPOINT, RUSCARL_MODEL, RUSCARL_API_KEY.
    void apply_environment();

    // Key/value overrides using the same dotted keys as the file format,
    // e.g. {"scaffold.decay", "constant"}.
    void apply_overrides(const std::map<std::string, std::string>& overrides);

    std::string resolved_json() const;
};

IntraGroupMode parse_intra_mode(const std::string& text);
DecayFamily parse_decay(const std::string& text, double alpha, double t0);
GraderConfig::Kind parse_grader_kind(const std::string& text);

} // namespace ruscarl
