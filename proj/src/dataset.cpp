#include "ruscarl/dataset.hpp"

#include <fstream>

#include <json.hpp>

#include "ruscarl/errors.hpp"

namespace ruscarl {

using nlohmann::json;

namespace {

json check_to_json(const SyntheticCheck& check) {
    json j;
    j["kind"] = check.kind_name();
    j["a"] = check.a;
    if (check.kind == SyntheticCheck::Kind::OrderedPair) j["b"] = check.b;
    return j;
}

SyntheticCheck check_from_json(const json& j) {
    return SyntheticCheck::from_parts(j.at("kind").get<std::string>(),
                                      j.value("a", 0), j.value("b", 0));
}

json task_to_json(const RubricTask& task) {
    json j;
    j["task_id"] = task.task_id;
    json conv = json::array();
    for (const auto& turn : task.conversation) {
        conv.push_back({{"role", turn.role}, {"content", turn.content}});
    }
    j["conversation"] = std::move(conv);
    json rubrics = json::array();
    for (const auto& c : task.rubric.criteria) {
        json rc;
        rc["id"] = c.id;
        rc["criterion"] = c.text;
        rc["points"] = c.points;
        if (c.check) rc["check"] = check_to_json(*c.check);
        rubrics.push_back(std::move(rc));
    }
    j["rubrics"] = std::move(rubrics);
    if (!task.witness.empty()) j["witness"] = task.witness;
    return j;
}

RubricTask task_from_json(const json& j) {
    RubricTask task;
    task.task_id = j.at("task_id").get<std::string>();
    for (const auto& turn : j.at("conversation")) {
        task.conversation.push_back({turn.at("role").get<std::string>(),
                                     turn.at("content").get<std::string>()});
    }
    int auto_id = 0;
    for (const auto& rc : j.at("rubrics")) {
        Criterion c;
        ++auto_id;
        c.id = rc.value("id", "c" + std::to_string(auto_id));
        c.text = rc.at("criterion").get<std::string>();
        c.points = rc.at("points").get<double>();
        if (rc.contains("check")) c.check = check_from_json(rc.at("check"));
        task.rubric.criteria.push_back(std::move(c));
    }
    if (j.contains("witness")) {
        task.witness = j.at("witness").get<std::vector<int>>();
    }
    validate_task(task);
    return task;
}

} // namespace

std::vector<RubricTask> load_tasks(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BadConfig("cannot read dataset: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseFailure("dataset " + path + ": " + e.what());
    }
    std::vector<RubricTask> tasks;
    for (const auto& jt : doc.at("tasks")) {
        tasks.push_back(task_from_json(jt));
    }
    return tasks;
}

void save_tasks(const std::vector<RubricTask>& tasks, const std::string& path) {
    json doc;
    json arr = json::array();
    for (const auto& t : tasks) arr.push_back(task_to_json(t));
    doc["tasks"] = std::move(arr);
    std::ofstream out(path);
    if (!out) throw BadConfig("cannot write dataset: " + path);
    out << doc.dump(2) << "\n";
}

std::vector<ResponseRecord> load_responses(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BadConfig("cannot read responses: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseFailure("responses " + path + ": " + e.what());
    }
    std::vector<ResponseRecord> out;
    for (const auto& r : doc.at("responses")) {
        out.push_back({r.at("task_id").get<std::string>(),
                       r.at("response").get<std::string>()});
    }
    if (out.empty()) throw ValidationFailure("responses file is empty: " + path);
    return out;
}

void save_responses(const std::vector<ResponseRecord>& responses,
                    const std::string& path) {
    json doc;
    json arr = json::array();
    for (const auto& r : responses) {
        arr.push_back({{"task_id", r.task_id}, {"response", r.response}});
    }
    doc["responses"] = std::move(arr);
    std::ofstream out(path);
    if (!out) throw BadConfig("cannot write responses: " + path);
    out << doc.dump(2) << "\n";
}

} // namespace ruscarl
