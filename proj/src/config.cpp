#include "ruscarl/config.hpp"

#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "ruscarl/errors.hpp"

namespace ruscarl {

using nlohmann::json;

IntraGroupMode parse_intra_mode(const std::string& text) {
    if (text == "linear") return IntraGroupMode::linear();
    if (text.rfind("binary:", 0) == 0) {
        return IntraGroupMode::binary(std::stoi(text.substr(7)));
    }
    throw BadConfig("unknown intra-group mode '" + text +
                    "' (expected linear or binary:N)");
}

DecayFamily parse_decay(const std::string& text, double alpha, double t0) {
    if (text == "sigmoid") return DecayFamily::sigmoid(alpha, t0);
    if (text == "constant") return DecayFamily::constant();
    if (text == "linear") return DecayFamily::linear();
    if (text.rfind("power:", 0) == 0) {
        return DecayFamily::power(std::stod(text.substr(6)));
    }
    throw BadConfig("unknown decay '" + text +
                    "' (expected sigmoid, constant, linear, or power:N)");
}

GraderConfig::Kind parse_grader_kind(const std::string& text) {
    if (text == "oracle") return GraderConfig::Kind::Oracle;
    if (text == "mock") return GraderConfig::Kind::Mock;
    if (text == "llm") return GraderConfig::Kind::Llm;
    throw BadConfig("unknown grader '" + text + "' (expected oracle|mock|llm)");
}

namespace {

std::string intra_to_string(const IntraGroupMode& m) {
    if (m.kind == IntraGroupMode::Kind::Linear) return "linear";
    return "binary:" + std::to_string(m.binary_n);
}

std::string decay_to_string(const DecayFamily& d) {
    switch (d.kind) {
        case DecayFamily::Kind::Sigmoid: return "sigmoid";
        case DecayFamily::Kind::Constant: return "constant";
        case DecayFamily::Kind::LinearDecay: return "linear";
        case DecayFamily::Kind::Power: {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "power:%g", d.power_n);
            return buf;
        }
    }
    return {};
}

std::string grader_kind_to_string(GraderConfig::Kind k) {
    switch (k) {
        case GraderConfig::Kind::Oracle: return "oracle";
        case GraderConfig::Kind::Mock: return "mock";
        case GraderConfig::Kind::Llm: return "llm";
    }
    return {};
}

} // namespace

RunConfig RunConfig::profile(const std::string& name) {
    RunConfig cfg;
    if (name == "desk" || name.empty()) {
        return cfg;  // struct defaults are the desk profile
    }
    if (name == "paper") {
        // Reference values from the published training configuration; the
        // toy policy cannot use them effectively but they stay addressable.
        cfg.train.group_size = 8;
        cfg.train.batch_size = 64;
        cfg.train.mini_batch = 32;
        cfg.train.learning_rate = 1e-6;
        cfg.train.kl_coef = 1e-3;
        cfg.train.sampling.temperature = 0.7;
        cfg.train.sampling.top_p = 0.8;
        cfg.train.sampling.top_k = 20;
        cfg.train.sampling.max_length = 4096;
        cfg.train.scaffold.intra = IntraGroupMode::linear();
        cfg.train.scaffold.decay = DecayFamily::sigmoid(125.0, 0.2);
        return cfg;
    }
    throw BadConfig("unknown profile '" + name + "' (expected desk or paper)");
}

void RunConfig::apply_json(const std::string& json_text) {
    json doc = json::parse(json_text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) {
        throw BadConfig("config is not a JSON object");
    }

    if (doc.contains("profile")) {
        *this = profile(doc["profile"].get<std::string>());
    }

    auto& t = train;
    if (doc.contains("seed")) t.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("group_size")) t.group_size = doc["group_size"].get<int>();
    if (doc.contains("batch_size")) t.batch_size = doc["batch_size"].get<int>();
    if (doc.contains("mini_batch")) t.mini_batch = doc["mini_batch"].get<int>();
    if (doc.contains("learning_rate")) t.learning_rate = doc["learning_rate"].get<double>();
    if (doc.contains("clip_eps")) t.clip_eps = doc["clip_eps"].get<double>();
    if (doc.contains("kl_coef")) t.kl_coef = doc["kl_coef"].get<double>();
    if (doc.contains("total_steps")) t.total_steps = doc["total_steps"].get<int>();
    if (doc.contains("vocab_size")) t.vocab_size = doc["vocab_size"].get<int>();
    if (doc.contains("eval_samples_per_task")) {
        t.eval_samples_per_task = doc["eval_samples_per_task"].get<int>();
    }
    if (doc.contains("diversity_every")) {
        t.diversity_every = doc["diversity_every"].get<int>();
    }

    if (doc.contains("scaffold")) {
        const auto& s = doc["scaffold"];
        double alpha = t.scaffold.decay.alpha;
        double t0 = t.scaffold.decay.t0;
        if (s.contains("alpha")) alpha = s["alpha"].get<double>();
        if (s.contains("t0")) t0 = s["t0"].get<double>();
        if (s.contains("decay")) {
            t.scaffold.decay = parse_decay(s["decay"].get<std::string>(), alpha, t0);
        } else if (t.scaffold.decay.kind == DecayFamily::Kind::Sigmoid) {
            t.scaffold.decay.alpha = alpha;
            t.scaffold.decay.t0 = t0;
        }
        if (s.contains("intra")) {
            t.scaffold.intra = parse_intra_mode(s["intra"].get<std::string>());
        }
        if (s.contains("guidance_strength")) {
            t.scaffold.guidance_strength = s["guidance_strength"].get<double>();
        }
    }

    if (doc.contains("sampling")) {
        const auto& s = doc["sampling"];
        if (s.contains("temperature")) t.sampling.temperature = s["temperature"].get<double>();
        if (s.contains("top_p")) t.sampling.top_p = s["top_p"].get<double>();
        if (s.contains("top_k")) t.sampling.top_k = s["top_k"].get<int>();
        if (s.contains("max_length")) t.sampling.max_length = s["max_length"].get<int>();
    }

    if (doc.contains("grader")) {
        const auto& g = doc["grader"];
        if (g.contains("kind")) grader.kind = parse_grader_kind(g["kind"].get<std::string>());
        if (g.contains("endpoint")) grader.endpoint = g["endpoint"].get<std::string>();
        if (g.contains("model")) grader.model = g["model"].get<std::string>();
        if (g.contains("timeout_seconds")) grader.timeout_seconds = g["timeout_seconds"].get<int>();
        if (g.contains("max_retries")) grader.max_retries = g["max_retries"].get<int>();
        if (g.contains("parallelism")) grader.parallelism = g["parallelism"].get<int>();
        if (g.contains("transcript")) grader.transcript_path = g["transcript"].get<std::string>();
    }

    if (doc.contains("dataset")) dataset_path = doc["dataset"].get<std::string>();
    if (doc.contains("out")) out_dir = doc["out"].get<std::string>();
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BadConfig("cannot read config file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    RunConfig cfg;
    cfg.apply_json(text);
    return cfg;
}

void RunConfig::apply_environment() {
    if (const char* v = std::getenv("RUSCARL_ENDPOINT")) grader.endpoint = v;
    if (const char* v = std::getenv("RUSCARL_MODEL")) grader.model = v;
    if (const char* v = std::getenv("RUSCARL_API_KEY")) grader.api_key = v;
}

void RunConfig::apply_overrides(
    const std::map<std::string, std::string>& overrides) {
    for (const auto& [key, value] : overrides) {
        if (key == "seed") train.seed = std::stoull(value);
        else if (key == "group_size") train.group_size = std::stoi(value);
        else if (key == "total_steps") train.total_steps = std::stoi(value);
        else if (key == "learning_rate") train.learning_rate = std::stod(value);
        else if (key == "scaffold.decay") {
            train.scaffold.decay = parse_decay(value, train.scaffold.decay.alpha,
                                              train.scaffold.decay.t0);
        } else if (key == "scaffold.alpha") {
            train.scaffold.decay.alpha = std::stod(value);
        } else if (key == "scaffold.t0") {
            train.scaffold.decay.t0 = std::stod(value);
        } else if (key == "scaffold.intra") {
            train.scaffold.intra = parse_intra_mode(value);
        } else if (key == "grader.kind") {
            grader.kind = parse_grader_kind(value);
        } else if (key == "grader.endpoint") grader.endpoint = value;
        else if (key == "grader.model") grader.model = value;
        else if (key == "dataset") dataset_path = value;
        else if (key == "out") out_dir = value;
        else throw BadConfig("unknown override key: " + key);
    }
}

std::string RunConfig::resolved_json() const {
    json doc;
    doc["seed"] = train.seed;
    doc["group_size"] = train.group_size;
    doc["batch_size"] = train.batch_size;
    doc["mini_batch"] = train.mini_batch;
    doc["learning_rate"] = train.learning_rate;
    doc["clip_eps"] = train.clip_eps;
    doc["kl_coef"] = train.kl_coef;
    doc["total_steps"] = train.total_steps;
    doc["vocab_size"] = train.vocab_size;
    doc["eval_samples_per_task"] = train.eval_samples_per_task;
    doc["diversity_every"] = train.diversity_every;
    doc["scaffold"] = {{"intra", intra_to_string(train.scaffold.intra)},
                       {"decay", decay_to_string(train.scaffold.decay)},
                       {"alpha", train.scaffold.decay.alpha},
                       {"t0", train.scaffold.decay.t0},
                       {"guidance_strength", train.scaffold.guidance_strength}};
    doc["sampling"] = {{"temperature", train.sampling.temperature},
                       {"top_p", train.sampling.top_p},
                       {"top_k", train.sampling.top_k},
                       {"max_length", train.sampling.max_length}};
    doc["grader"] = {{"kind", grader_kind_to_string(grader.kind)},
                     {"endpoint", grader.endpoint},
                     {"model", grader.model},
                     {"timeout_seconds", grader.timeout_seconds},
                     {"max_retries", grader.max_retries},
                     {"parallelism", grader.parallelism},
                     {"transcript", grader.transcript_path}};
    doc["dataset"] = dataset_path;
    doc["out"] = out_dir;
    return doc.dump(2);
}

} // namespace ruscarl
