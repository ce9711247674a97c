// Command-line front end: run, resume, report, expert-gen and ppo-train.

#include <cstdio>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"

#include "arena/core/assets.hpp"
#include "arena/core/error.hpp"
#include "arena/harness/harness.hpp"
#include "arena/ppo/train.hpp"

namespace fs = std::filesystem;
using namespace arena;

namespace {

constexpr int kExitIncomplete = 1;
constexpr int kExitError = 2;

void print_summary(const harness::RunSummary& s, const fs::path& dir) {
    std::cout << "run dir: " << dir.string() << "\n"
              << "executed " << s.executed << ", reused " << s.reused << "; completed " << s.completed
              << ", failed " << s.failed << ", skipped " << s.skipped << "\n";
}

int cmd_run(const std::string& config_path, const std::string& backend, int seed_count, const std::string& out,
            int workers) {
    std::string text = read_text_file(config_path);
    std::string overrides;
    if (!backend.empty()) overrides += "backend = " + backend + "\n";
    if (seed_count > 0) overrides += "seed_count = " + std::to_string(seed_count) + "\n";
    if (workers > 0) overrides += "workers = " + std::to_string(workers) + "\n";
    if (!overrides.empty()) {
        if (!text.empty() && text.back() != '\n') text += '\n';
        text += "# command-line overrides\n" + overrides;
    }
    auto config = harness::parse_config(text, fs::absolute(config_path).parent_path());
    const fs::path dir = out.empty() ? config.output : fs::path(out);
    const auto summary = harness::run_experiment(text, config, dir);
    print_summary(summary, dir);
    return summary.all_completed() ? 0 : kExitIncomplete;
}

int cmd_resume(const std::string& dir, const std::string& config_path, int workers) {
    std::optional<harness::ExperimentConfig> config;
    if (!config_path.empty()) config = harness::load_config(config_path);
    if (config && workers > 0) config->workers = workers;
    const auto summary = harness::resume_experiment(dir, config);
    print_summary(summary, dir);
    return summary.all_completed() ? 0 : kExitIncomplete;
}

int cmd_report(const std::string& dir, const std::string& thresholds) {
    std::optional<fs::path> table;
    if (!thresholds.empty()) table = thresholds;
    const auto out = harness::report(dir, table);
    std::cout << "report written to " << out.string() << "\n";
    return 0;
}

int cmd_expert_gen(const std::string& env_name, const std::string& policy, int n, std::uint64_t seed,
                   const std::string& out) {
    const EnvId env = parse_env_id(env_name);
    const fs::path path = out.empty() ? fs::path(harness::dataset_file_name(env, policy)) : fs::path(out);
    const auto file = harness::expert_gen(env, policy, n, seed, path);
    std::cout << "wrote " << file.episodes.size() << " episodes to " << path.string() << "\n";
    return 0;
}

int cmd_ppo_train(const std::string& env_name, bool grid, std::uint64_t seed, int seeds, int epochs,
                  const std::string& out, int threads) {
    const EnvId env = parse_env_id(env_name);
    const fs::path dir = out.empty() ? fs::path("ppo") / std::string(to_string(env)) : fs::path(out);
    fs::create_directories(dir);

    ppo::PpoConfig cfg = ppo::tuned_config(env);
    if (epochs > 0) cfg.epochs = epochs;
    if (grid) {
        std::vector<std::uint64_t> seed_list;
        for (int i = 0; i < seeds; ++i) seed_list.push_back(seed + static_cast<std::uint64_t>(i));
        const auto result = ppo::grid_search(env, ppo::full_grid(cfg), seed_list, threads);
        write_file_atomic(dir / "grid.csv", ppo::grid_csv(result));
        cfg = result.best;
        std::cout << "grid of " << result.rows.size() << " configs written to " << (dir / "grid.csv").string()
                  << "\n";
    }
    cfg.seed = seed;
    const auto trained = ppo::train(env, cfg);
    write_file_atomic(dir / "config.txt", ppo::describe_config(cfg));
    write_file_atomic(dir / "curve.csv", ppo::curve_csv(trained.curve));
    ppo::save_checkpoint(dir / "checkpoint.txt", trained.params);
    const double greedy = ppo::greedy_return(trained.params, env, seed, cfg.step_cap);
    std::printf("epochs %zu, final 10-epoch mean %.2f, best %.2f, greedy %.2f, target %s\n", trained.curve.size(),
                ppo::final_return(trained.curve), trained.best_rolling_mean, greedy,
                trained.reached_target ? "reached" : "not reached");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Text-grounded decision-making benchmark"};
    app.require_subcommand(1);

    std::string config_path, backend, out, dir, thresholds, env, policy = "expert";
    int seed_count = 0, workers = 0, n = 5, seeds = 5, epochs = 0, threads = 4;
    std::uint64_t seed = 0;
    bool grid = false;

    auto* run = app.add_subcommand("run", "Run every cell of an experiment config");
    run->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
    run->add_option("--backend", backend, "Override the backend")->check(CLI::IsMember({"mock", "live"}));
    run->add_option("--seeds", seed_count, "Use seeds 0..k-1")->check(CLI::PositiveNumber);
    run->add_option("--out", out, "Run directory (default: the config's output)");
    run->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

    auto* resume = app.add_subcommand("resume", "Finish the missing cells of a run");
    resume->add_option("dir", dir, "Run directory")->required()->check(CLI::ExistingDirectory);
    resume->add_option("--config", config_path, "Config that must match the snapshot")->check(CLI::ExistingFile);
    resume->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

    auto* rep = app.add_subcommand("report", "Write CSV and SVG summaries of a run");
    rep->add_option("dir", dir, "Run directory")->required()->check(CLI::ExistingDirectory);
    rep->add_option("--thresholds", thresholds, "CSV with env,solvable,sota")->check(CLI::ExistingFile);

    auto* gen = app.add_subcommand("expert-gen", "Record reference-policy trajectories");
    gen->add_option("--env", env, "Environment")->required();
    gen->add_option("--policy", policy, "random, expert or tabular");
    gen->add_option("--n", n, "Episodes")->check(CLI::PositiveNumber);
    gen->add_option("--seed", seed, "Seed");
    gen->add_option("--out", out, "Output file (default: <env>.<random|expert>.jsonl)");

    auto* ppo_cmd = app.add_subcommand("ppo-train", "Train the PPO baseline");
    ppo_cmd->add_option("--env", env, "Environment")->required();
    ppo_cmd->add_flag("--grid", grid, "Grid-search all 54 configs first");
    ppo_cmd->add_option("--seed", seed, "Seed of the final run, first grid seed");
    ppo_cmd->add_option("--seeds", seeds, "Seeds per grid config")->check(CLI::PositiveNumber);
    ppo_cmd->add_option("--epochs", epochs, "Epoch cap (default 400)")->check(CLI::PositiveNumber);
    ppo_cmd->add_option("--threads", threads, "Grid worker threads")->check(CLI::PositiveNumber);
    ppo_cmd->add_option("--out", out, "Output directory (default: ppo/<env>)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, backend, seed_count, out, workers);
        if (resume->parsed()) return cmd_resume(dir, config_path, workers);
        if (rep->parsed()) return cmd_report(dir, thresholds);
        if (gen->parsed()) return cmd_expert_gen(env, policy, n, seed, out);
        if (ppo_cmd->parsed()) return cmd_ppo_train(env, grid, seed, seeds, epochs, out, threads);
    } catch (const Error& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
