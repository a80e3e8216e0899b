#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "ruscarl/config.hpp"
#include "ruscarl/dataset.hpp"
#include "ruscarl/errors.hpp"
#include "ruscarl/grader.hpp"
#include "ruscarl/metrics.hpp"
#include "ruscarl/prompts.hpp"
#include "ruscarl/synthenv.hpp"
#include "ruscarl/trainer.hpp"

namespace fs = std::filesystem;
using namespace ruscarl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitBackend = 3;

struct CommonFlags {
    std::string config_file;
    std::map<std::string, std::string> overrides;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_file, "JSON config file");
        const auto add = [this, cmd](const std::string& flag,
                                     const std::string& key,
                                     const std::string& help) {
            cmd->add_option_function<std::string>(
                flag, [this, key](const std::string& v) { overrides[key] = v; },
                help);
        };
        add("--seed", "seed", "RNG seed");
        add("--group-size", "group_size", "rollout group size G");
        add("--steps", "total_steps", "training steps");
        add("--lr", "learning_rate", "learning rate");
        add("--decay", "scaffold.decay",
            "decay family: sigmoid|constant|linear|power:N");
        add("--alpha", "scaffold.alpha", "sigmoid steepness");
        add("--t0", "scaffold.t0", "sigmoid midpoint");
        add("--intra", "scaffold.intra", "intra-group mode: linear|binary:N");
        add("--grader", "grader.kind", "grader backend: oracle|mock|llm");
        add("--endpoint", "grader.endpoint", "judge endpoint URL");
        add("--model", "grader.model", "judge model name");
        add("--dataset", "dataset", "task dataset path");
        add("--out", "out", "output directory");
    }

    RunConfig resolve() const {
        RunConfig cfg;
        if (!config_file.empty()) cfg = RunConfig::from_file(config_file);
        cfg.apply_environment();
        cfg.apply_overrides(overrides);
        return cfg;
    }
};

std::vector<RubricTask> load_or_generate(const RunConfig& cfg) {
    if (!cfg.dataset_path.empty()) return load_tasks(cfg.dataset_path);
    SynthTaskSpec spec;
    spec.seed = cfg.train.seed;
    spec.vocab_size = cfg.train.vocab_size;
    spec.max_length = cfg.train.sampling.max_length;
    return generate_tasks(spec);
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw BadConfig("cannot write " + path.string());
    out << text;
}

int run_train(const RunConfig& cfg) {
    const auto tasks = load_or_generate(cfg);
    auto grader = make_grader(cfg.grader);

    fs::create_directories(cfg.out_dir);
    const fs::path out(cfg.out_dir);
    write_text(out / "resolved_config.json", cfg.resolved_json() + "\n");
    write_schedule_csv(cfg.train, (out / "schedule.csv").string());

    const double before = evaluate_mean_reward(
        PolicyParams(cfg.train.vocab_size, cfg.train.sampling.max_length), tasks,
        *grader, cfg.train, cfg.train.seed);

    const auto result = train(cfg.train, tasks, *grader);
    result.history.save_jsonl((out / "history.jsonl").string());
    result.history.save_csv((out / "metrics.csv").string());
    result.params.save((out / "policy.json").string());

    const double after = evaluate_mean_reward(result.params, tasks, *grader,
                                              cfg.train, cfg.train.seed);
    std::cout << "eval_reward_initial " << before << "\n"
              << "eval_reward_final " << after << "\n"
              << "out_dir " << cfg.out_dir << "\n";
    return kExitOk;
}

int run_ablate(const RunConfig& base) {
    const auto tasks = load_or_generate(base);
    auto grader = make_grader(base.grader);
    fs::create_directories(base.out_dir);

    struct Condition {
        std::string name;
        ScaffoldConfig scaffold;
    };
    std::vector<Condition> conditions;
    {
        ScaffoldConfig off = base.train.scaffold;
        off.intra = IntraGroupMode::binary(0);
        conditions.push_back({"unscaffolded", off});
    }
    for (const char* decay : {"sigmoid", "constant", "linear", "power:2"}) {
        ScaffoldConfig s = base.train.scaffold;
        s.decay = parse_decay(decay, base.train.scaffold.decay.alpha,
                              base.train.scaffold.decay.t0);
        conditions.push_back({decay, s});
    }

    std::ofstream csv(fs::path(base.out_dir) / "ablation.csv");
    if (!csv) throw BadConfig("cannot write ablation.csv");
    csv << "condition,eval_reward_final,mean_reward_last_step\n";
    for (const auto& cond : conditions) {
        RunConfig cfg = base;
        cfg.train.scaffold = cond.scaffold;
        const auto result = train(cfg.train, tasks, *grader);
        const double eval = evaluate_mean_reward(result.params, tasks, *grader,
                                                 cfg.train, cfg.train.seed);
        const double last = result.history.records.back().mean_reward;
        csv << cond.name << ',' << eval << ',' << last << "\n";
        std::cout << cond.name << " eval_reward_final " << eval << "\n";
    }
    std::cout << "out_dir " << base.out_dir << "\n";
    return kExitOk;
}

int run_grade(const RunConfig& cfg, const std::string& responses_path) {
    const auto tasks = load_or_generate(cfg);
    const auto responses = load_responses(responses_path);
    auto grader = make_grader(cfg.grader);

    std::map<std::string, const RubricTask*> by_id;
    for (const auto& t : tasks) by_id[t.task_id] = &t;

    fs::create_directories(cfg.out_dir);
    std::ofstream csv(fs::path(cfg.out_dir) / "scores.csv");
    if (!csv) throw BadConfig("cannot write scores.csv");
    csv << "task_id,reward\n";
    for (const auto& r : responses) {
        auto it = by_id.find(r.task_id);
        if (it == by_id.end()) {
            throw ValidationFailure("unknown task_id in responses: " + r.task_id);
        }
        const auto judgments = grade_rubric(*grader, *it->second, r.response);
        const auto report = score_report(judgments, it->second->rubric);
        csv << r.task_id << ',' << report.reward << "\n";
        std::cout << r.task_id << " " << report.reward << "\n";
    }
    return kExitOk;
}

int run_bon(const RunConfig& cfg, const std::string& policy_path,
            std::vector<int> n_values) {
    const auto tasks = load_or_generate(cfg);
    auto grader = make_grader(cfg.grader);
    PolicyParams params =
        policy_path.empty()
            ? PolicyParams(cfg.train.vocab_size, cfg.train.sampling.max_length)
            : PolicyParams::load(policy_path);

    if (n_values.empty()) n_values = {1, 2, 4, 8};
    const auto curve = best_of_n(params, tasks, *grader, cfg.train.sampling,
                                 n_values, cfg.train.seed);

    fs::create_directories(cfg.out_dir);
    std::ofstream csv(fs::path(cfg.out_dir) / "best_of_n.csv");
    if (!csv) throw BadConfig("cannot write best_of_n.csv");
    csv << "n,mean_max_reward\n";
    for (const auto& point : curve) {
        csv << point.n << ',' << point.mean_max_reward << "\n";
        std::cout << "n=" << point.n << " " << point.mean_max_reward << "\n";
    }
    return kExitOk;
}

int run_gen_data(const SynthTaskSpec& spec, const std::string& out_path) {
    spec.validate();
    const auto tasks = generate_tasks(spec);
    save_tasks(tasks, out_path);
    std::cout << "wrote " << tasks.size() << " tasks to " << out_path << "\n";
    return kExitOk;
}

int run_metrics(const std::string& responses_path) {
    const auto responses = load_responses(responses_path);
    std::vector<std::string> texts;
    texts.reserve(responses.size());
    for (const auto& r : responses) texts.push_back(r.response);

    std::cout << "responses " << texts.size() << "\n"
              << "one_minus_self_bleu " << self_bleu_diversity_text(texts) << "\n"
              << "mean_semantic_distance "
              << semantic_distance(texts, HashNgramEmbedder()) << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rubric-scaffolded RL harness"};
    app.require_subcommand(1);

    CommonFlags train_flags;
    auto* train_cmd = app.add_subcommand("train", "Train the toy policy");
    train_flags.attach(train_cmd);

    CommonFlags ablate_flags;
    auto* ablate_cmd =
        app.add_subcommand("ablate", "Compare scaffolding schedules");
    ablate_flags.attach(ablate_cmd);

    CommonFlags grade_flags;
    std::string responses_path;
    auto* grade_cmd = app.add_subcommand("grade", "Grade a responses file");
    grade_flags.attach(grade_cmd);
    grade_cmd->add_option("--responses", responses_path, "responses JSON file")
        ->required();

    CommonFlags bon_flags;
    std::string policy_path;
    std::vector<int> n_values;
    auto* bon_cmd = app.add_subcommand("bon", "Best-of-N evaluation curve");
    bon_flags.attach(bon_cmd);
    bon_cmd->add_option("--policy", policy_path, "policy checkpoint to evaluate");
    bon_cmd->add_option("--n", n_values, "N values (sorted ascending)");

    SynthTaskSpec gen_spec;
    std::string gen_out = "tasks.json";
    auto* gen_cmd = app.add_subcommand("gen-data", "Generate a synthetic dataset");
    gen_cmd->add_option("--seed", gen_spec.seed, "generation seed");
    gen_cmd->add_option("--tasks", gen_spec.task_count, "number of tasks");
    gen_cmd->add_option("--vocab", gen_spec.vocab_size, "vocabulary size");
    gen_cmd->add_option("--max-length", gen_spec.max_length, "max response length");
    gen_cmd->add_option("--neg-fraction", gen_spec.negative_fraction,
                        "fraction of negative criteria");
    gen_cmd->add_option("--out", gen_out, "output dataset path");

    std::string question;
    std::string answer;
    auto* prompt_cmd = app.add_subcommand(
        "gen-rubric-prompt", "Print the rubric generation prompt for a QA pair");
    prompt_cmd->add_option("--question", question, "question text")->required();
    prompt_cmd->add_option("--answer", answer, "reference answer text")
        ->required();

    std::string metrics_responses;
    auto* metrics_cmd =
        app.add_subcommand("metrics", "Diversity metrics for a responses file");
    metrics_cmd
        ->add_option("--responses", metrics_responses, "responses JSON file")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (train_cmd->parsed()) return run_train(train_flags.resolve());
        if (ablate_cmd->parsed()) return run_ablate(ablate_flags.resolve());
        if (grade_cmd->parsed()) {
            return run_grade(grade_flags.resolve(), responses_path);
        }
        if (bon_cmd->parsed()) {
            return run_bon(bon_flags.resolve(), policy_path, n_values);
        }
        if (gen_cmd->parsed()) return run_gen_data(gen_spec, gen_out);
        if (prompt_cmd->parsed()) {
            std::cout << render_rubric_gen_prompt(question, answer) << "\n";
            return kExitOk;
        }
        if (metrics_cmd->parsed()) return run_metrics(metrics_responses);
    } catch (const GradingUnavailable& e) {
        std::cerr << "grading backend unavailable: " << e.what() << "\n";
        return kExitBackend;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitConfig;
}
