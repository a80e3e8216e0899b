#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "ruscarl/config.hpp"
#include "ruscarl/errors.hpp"

using namespace ruscarl;
using nlohmann::json;

TEST_CASE("desk profile carries the toy-scale defaults") {
    const auto cfg = RunConfig::profile("desk");
    CHECK(cfg.train.group_size == 8);
    CHECK(cfg.train.batch_size == 16);
    CHECK(cfg.train.learning_rate == 10.0);
    CHECK(cfg.train.clip_eps == 0.2);
    CHECK(cfg.train.kl_coef == 1e-3);
    CHECK(cfg.train.total_steps == 200);
    CHECK(cfg.train.vocab_size == 32);
    CHECK(cfg.train.sampling.max_length == 16);
    CHECK(cfg.train.scaffold.decay.kind == DecayFamily::Kind::Sigmoid);
    CHECK(cfg.train.scaffold.decay.alpha == 125.0);
    CHECK(cfg.train.scaffold.decay.t0 == 0.2);
    CHECK(cfg.grader.kind == GraderConfig::Kind::Oracle);
}

TEST_CASE("paper profile preserves the reference hyperparameters") {
    const auto cfg = RunConfig::profile("paper");
    CHECK(cfg.train.group_size == 8);
    CHECK(cfg.train.batch_size == 64);
    CHECK(cfg.train.mini_batch == 32);
    CHECK(cfg.train.learning_rate == 1e-6);
    CHECK(cfg.train.kl_coef == 1e-3);
    CHECK(cfg.train.sampling.temperature == 0.7);
    CHECK(cfg.train.sampling.top_p == 0.8);
    CHECK(cfg.train.sampling.top_k == 20);
    CHECK(cfg.train.sampling.max_length == 4096);
    CHECK(cfg.train.scaffold.decay.kind == DecayFamily::Kind::Sigmoid);

    CHECK_THROWS_AS(RunConfig::profile("desktop"), BadConfig);
}

TEST_CASE("parsers accept the documented spellings") {
    CHECK(parse_intra_mode("linear").kind == IntraGroupMode::Kind::Linear);
    const auto bin = parse_intra_mode("binary:3");
    CHECK(bin.kind == IntraGroupMode::Kind::Binary);
    CHECK(bin.binary_n == 3);
    CHECK_THROWS_AS(parse_intra_mode("ternary"), BadConfig);

    CHECK(parse_decay("sigmoid", 10.0, 0.5).kind == DecayFamily::Kind::Sigmoid);
    CHECK(parse_decay("constant", 0, 0).kind == DecayFamily::Kind::Constant);
    CHECK(parse_decay("linear", 0, 0).kind == DecayFamily::Kind::LinearDecay);
    const auto pw = parse_decay("power:2.5", 0, 0);
    CHECK(pw.kind == DecayFamily::Kind::Power);
    CHECK(pw.power_n == 2.5);
    CHECK_THROWS_AS(parse_decay("cosine", 0, 0), BadConfig);

    CHECK(parse_grader_kind("oracle") == GraderConfig::Kind::Oracle);
    CHECK(parse_grader_kind("mock") == GraderConfig::Kind::Mock);
    CHECK(parse_grader_kind("llm") == GraderConfig::Kind::Llm);
    CHECK_THROWS_AS(parse_grader_kind("human"), BadConfig);
}

TEST_CASE("json config overrides nest and round-trip") {
    RunConfig cfg;
    cfg.apply_json(R"({
        "seed": 9,
        "group_size": 6,
        "total_steps": 50,
        "learning_rate": 0.01,
        "scaffold": {"decay": "power:2", "intra": "binary:4",
                     "guidance_strength": 1.5},
        "sampling": {"temperature": 1.0, "top_k": 8},
        "grader": {"kind": "llm", "endpoint": "http://localhost:1",
                   "model": "m", "parallelism": 2},
        "dataset": "tasks.json",
        "out": "runs/demo"
    })");

    CHECK(cfg.train.seed == 9);
    CHECK(cfg.train.group_size == 6);
    CHECK(cfg.train.total_steps == 50);
    CHECK(cfg.train.learning_rate == 0.01);
    CHECK(cfg.train.scaffold.decay.kind == DecayFamily::Kind::Power);
    CHECK(cfg.train.scaffold.decay.power_n == 2.0);
    CHECK(cfg.train.scaffold.intra.kind == IntraGroupMode::Kind::Binary);
    CHECK(cfg.train.scaffold.guidance_strength == 1.5);
    CHECK(cfg.train.sampling.temperature == 1.0);
    CHECK(cfg.train.sampling.top_k == 8);
    CHECK(cfg.grader.kind == GraderConfig::Kind::Llm);
    CHECK(cfg.grader.endpoint == "http://localhost:1");
    CHECK(cfg.dataset_path == "tasks.json");
    CHECK(cfg.out_dir == "runs/demo");
    // Untouched keys keep their defaults.
    CHECK(cfg.train.batch_size == 16);

    const json resolved = json::parse(cfg.resolved_json());
    CHECK(resolved["group_size"] == 6);
    CHECK(resolved["scaffold"]["decay"] == "power:2");
    CHECK(resolved["scaffold"]["intra"] == "binary:4");
    CHECK(resolved["grader"]["kind"] == "llm");

    // Feeding the resolved output back reproduces the configuration.
    RunConfig replay;
    replay.apply_json(cfg.resolved_json());
    CHECK(replay.resolved_json() == cfg.resolved_json());
}

TEST_CASE("sigmoid parameters can be tuned without restating the family") {
    RunConfig cfg;
    cfg.apply_json(R"({"scaffold": {"alpha": 30, "t0": 0.4}})");
    CHECK(cfg.train.scaffold.decay.kind == DecayFamily::Kind::Sigmoid);
    CHECK(cfg.train.scaffold.decay.alpha == 30.0);
    CHECK(cfg.train.scaffold.decay.t0 == 0.4);
}

TEST_CASE("malformed config text is rejected") {
    RunConfig cfg;
    CHECK_THROWS_AS(cfg.apply_json("not json"), BadConfig);
    CHECK_THROWS_AS(cfg.apply_json("[1, 2]"), BadConfig);
    CHECK_THROWS_AS(RunConfig::from_file("/nonexistent/config.json"), BadConfig);
}

TEST_CASE("from_file reads a config on disk") {
    const auto path =
        std::filesystem::temp_directory_path() / "ruscarl_cfg_test.json";
    {
        std::ofstream out(path);
        out << R"({"profile": "paper", "total_steps": 7})";
    }
    const auto cfg = RunConfig::from_file(path.string());
    CHECK(cfg.train.learning_rate == 1e-6);  // from the profile
    CHECK(cfg.train.total_steps == 7);       // later key wins
    std::filesystem::remove(path);
}

TEST_CASE("environment supplies judge endpoint credentials") {
    setenv("RUSCARL_ENDPOINT", "http://judge:9", 1);
    setenv("RUSCARL_MODEL", "judge-model", 1);
    setenv("RUSCARL_API_KEY", "sk-test", 1);
    RunConfig cfg;
    cfg.apply_environment();
    CHECK(cfg.grader.endpoint == "http://judge:9");
    CHECK(cfg.grader.model == "judge-model");
    CHECK(cfg.grader.api_key == "sk-test");
    unsetenv("RUSCARL_ENDPOINT");
    unsetenv("RUSCARL_MODEL");
    unsetenv("RUSCARL_API_KEY");
}

TEST_CASE("command-line overrides outrank file values") {
    RunConfig cfg;
    cfg.apply_json(R"({"seed": 1, "scaffold": {"decay": "constant"}})");
    cfg.apply_overrides({{"seed", "99"},
                         {"scaffold.decay", "sigmoid"},
                         {"scaffold.alpha", "60"},
                         {"grader.kind", "mock"},
                         {"out", "runs/override"}});
    CHECK(cfg.train.seed == 99);
    CHECK(cfg.train.scaffold.decay.kind == DecayFamily::Kind::Sigmoid);
    CHECK(cfg.train.scaffold.decay.alpha == 60.0);
    CHECK(cfg.grader.kind == GraderConfig::Kind::Mock);
    CHECK(cfg.out_dir == "runs/override");

    CHECK_THROWS_AS(cfg.apply_overrides({{"bogus.key", "1"}}), BadConfig);
}
