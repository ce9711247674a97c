#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "arena/agents/agent.hpp"
#include "arena/env/environment.hpp"
#include "arena/eval/record.hpp"
#include "arena/llm/usage.hpp"
#include "arena/policies/dataset.hpp"

namespace arena::scenario {

/// lv1 no knowledge, lv2 random-policy experience, lv3 self-guided episodes,
/// lv4 expert experience, lv5 expert prompts.
enum class Level { lv1, lv2, lv3, lv4, lv5 };

inline constexpr std::array<Level, 5> kAllLevels = {Level::lv1, Level::lv2, Level::lv3, Level::lv4, Level::lv5};
inline constexpr int kDefaultEpisodes = 5;

std::string_view to_string(Level level);
/// Accepts "lv1".."lv5" or "1".."5"; throws ConfigError.
Level parse_level(std::string_view text);

struct ScenarioConfig {
    Level level = Level::lv1;
    EnvId env = EnvId::cartpole;
    int episodes = kDefaultEpisodes;  // lv3 only
    std::optional<TrajectoryFile> dataset;     // lv2, lv4
    std::optional<std::string> expert_prompt;  // lv5
    std::uint64_t seed = 0;
    int step_cap = kDefaultStepCap;
};

/// Dataset and prompt locations under an asset dir.
std::filesystem::path dataset_path(const std::filesystem::path& assets_dir, EnvId env, Level level);
std::filesystem::path expert_prompt_path(const std::filesystem::path& assets_dir, EnvId env);

/// Resolves and validates the assets a level needs. Throws MissingAsset,
/// DatasetEnvMismatch, FormatError.
ScenarioConfig make_scenario(Level level, EnvId env, const std::filesystem::path& assets_dir, std::uint64_t seed);

inline constexpr int kBlackjackHandsPerUnit = 20;

/// Episodes played per rollout: 20 hands for blackjack, otherwise one.
int episodes_per_unit(EnvId env);

struct ScenarioResult {
    std::vector<Trajectory> episodes;            // every environment episode, in order
    std::vector<std::size_t> knowledge_sizes;    // knowledge size after each learning step
    int units = 0;                               // rollout units played
    eval::RunRecord record;
};

/// Seed of the environment for the i-th episode of a run. Evaluation episodes
/// use a stream separate from dataset seeds.
std::uint64_t rollout_seed(std::uint64_t seed, int episode);

/// Lv1 (no knowledge) and Lv5 (expert prompt): one update, one rollout unit.
ScenarioResult run_static(agents::Agent& agent, const std::optional<std::string>& knowledge, std::uint64_t seed,
                          int step_cap = kDefaultStepCap);

/// Lv2/Lv4: each trajectory is added to knowledge followed by an update, then one rollout unit.
ScenarioResult run_offline(agents::Agent& agent, std::span<const Trajectory> trajectories, std::uint64_t seed,
                           int step_cap = kDefaultStepCap);

/// Lv3: N rounds of learner, rollout, critic and knowledge append.
ScenarioResult run_self_guided(agents::Agent& agent, int episodes, std::uint64_t seed,
                               int step_cap = kDefaultStepCap);

/// Dispatches on the level and fills the record's cell fields. Errors from
/// the gateway or the environment mark the record failed instead of throwing.
ScenarioResult run_scenario(agents::Agent& agent, const ScenarioConfig& config);

/// Tag identifying the calls of one cell in a shared ledger.
llm::CallTag cell_tag(agents::AgentKind agent, EnvId env, Level level, std::uint64_t seed);

/// Copies tokens, calls, cost and latency of the records carrying `tag` into
/// the run record. Wall time is the summed call latency so mock reruns match.
void fill_usage(eval::RunRecord& record, const std::vector<llm::UsageRecord>& records, const llm::CallTag& tag,
                const llm::Pricing* pricing);

}  // namespace arena::scenario
