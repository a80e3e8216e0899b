#pragma once

#include <string>
#include <vector>

#include "ruscarl/rubric.hpp"

namespace ruscarl {

// Rubric dataset file IO; docs/dataset_schema.md describes the format.
std::vector<RubricTask> load_tasks(const std::string& path);
void save_tasks(const std::vector<RubricTask>& tasks, const std::string& path);

struct ResponseRecord {
    std::string task_id;
    std::string response;
};

std::vector<ResponseRecord> load_responses(const std::string& path);
void save_responses(const std::vector<ResponseRecord>& responses,
                    const std::string& path);

} // namespace ruscarl
