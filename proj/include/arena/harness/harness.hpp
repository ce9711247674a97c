#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "arena/agents/agent.hpp"
#include "arena/eval/record.hpp"
#include "arena/llm/usage.hpp"
#include "arena/scenario/scenario.hpp"

namespace arena::harness {

enum class BackendKind { mock, live };

std::string_view to_string(BackendKind kind);
BackendKind parse_backend_kind(std::string_view text);

/// Experiment grid read from a key=value file. Recognised keys:
///   agents, envs, levels        comma lists; "all" expands to every value
///   seeds                       comma list of seeds, or seed_count = k for 0..k-1
///   backend                     mock | live
///   model                       live model name (LLM_MODEL, then the default)
///   mock_script                 JSON array of replies served in order to every cell
///   requests_per_minute, token_budget, workers, episodes
///   step_cap, step_cap.<env>    episode caps, global or per env
///   assets, pricing, output     paths, relative to the config file
struct ExperimentConfig {
    std::vector<agents::AgentKind> agents;
    std::vector<EnvId> envs;
    std::vector<scenario::Level> levels;
    std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
    BackendKind backend = BackendKind::mock;
    std::string model;
    std::optional<std::filesystem::path> mock_script;
    double requests_per_minute = 60.0;
    std::optional<long long> token_budget;
    int workers = 4;
    int episodes = scenario::kDefaultEpisodes;
    int step_cap = kDefaultStepCap;
    std::map<EnvId, int> step_caps;
    std::filesystem::path assets;
    std::filesystem::path pricing;
    std::filesystem::path output = "runs/latest";

    int step_cap_for(EnvId env) const;
    std::size_t cell_count() const { return agents.size() * envs.size() * levels.size() * seeds.size(); }
};

/// Relative paths resolve against `base_dir`. Throws ConfigError.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);
/// Canonical text of every effective setting, used for drift checks.
std::string canonical_config(const ExperimentConfig& config);

struct Cell {
    agents::AgentKind agent;
    EnvId env;
    scenario::Level level;
    std::uint64_t seed;
};

/// Grid in agent, env, level, seed order.
std::vector<Cell> grid_cells(const ExperimentConfig& config);

/// <run>/cells/<agent>/<env>/<level>/seed<k>
std::filesystem::path cell_dir(const std::filesystem::path& run_dir, const Cell& cell);

inline constexpr const char* kSnapshotFile = "config.txt";
inline constexpr const char* kRecordFile = "record.json";
inline constexpr const char* kTrajectoryFile = "trajectory.jsonl";
inline constexpr const char* kTranscriptFile = "transcript.jsonl";
inline constexpr const char* kBudgetNote = "skipped: token budget exhausted";

/// Creates the backend of one cell; the live backend is shared between cells.
using BackendFactory = std::function<std::shared_ptr<llm::Backend>(const Cell&)>;

/// Mock cells get their own scripted instance; live cells share one client.
BackendFactory default_backend_factory(const ExperimentConfig& config);

struct RunSummary {
    int executed = 0;   // cells run in this invocation
    int reused = 0;     // cells already complete on disk
    int completed = 0;  // completed cells after the run, reused included
    int failed = 0;
    int skipped = 0;
    bool all_completed() const { return failed == 0 && skipped == 0; }
};

/// Runs one cell and writes its trajectory, transcript and (last, atomically)
/// its record. Never throws for agent or backend errors.
eval::RunRecord run_cell(const ExperimentConfig& config, const Cell& cell, llm::Backend& backend,
                         llm::UsageLedger& ledger, const llm::Pricing* pricing, const std::filesystem::path& run_dir);

/// Snapshots the config text verbatim and runs every cell on the worker pool.
RunSummary run_experiment(const std::string& config_text, const ExperimentConfig& config,
                          const std::filesystem::path& run_dir, const BackendFactory& factory = {});

/// Re-runs only cells without a completed record. Throws ConfigDrift when
/// `config` is given and differs from the snapshot, MissingAsset without one.
RunSummary resume_experiment(const std::filesystem::path& run_dir,
                             const std::optional<ExperimentConfig>& config = std::nullopt,
                             const BackendFactory& factory = {});

/// Every record under the run dir. Records that fail to parse are ignored.
std::vector<eval::RunRecord> load_records(const std::filesystem::path& run_dir);

/// Writes the evaluation exports to <run>/report. Throws EmptyRun.
std::filesystem::path report(const std::filesystem::path& run_dir,
                             const std::optional<std::filesystem::path>& thresholds = std::nullopt);

/// Wraps dataset generation; the file name used by scenarios for `policy`.
std::string dataset_file_name(EnvId env, std::string_view policy);
TrajectoryFile expert_gen(EnvId env, std::string_view policy, int n, std::uint64_t seed,
                          const std::filesystem::path& out);

}  // namespace arena::harness
