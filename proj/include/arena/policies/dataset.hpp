#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "arena/env/types.hpp"

namespace arena {

/// Trajectory file (JSONL). The first line is a header
///   {"env", "seed", "policy", "created", "episode_seeds", "returns"}
/// followed by one object per transition
///   {"episode", "t", "obs", "action", "reward", "next_obs", "terminated", "truncated"}.
/// Observations are objects with the typed fields of the env; discrete
/// actions are 0-based integers, continuous actions are numbers.
struct TrajectoryFile {
    EnvId env = EnvId::cartpole;
    std::uint64_t seed = 0;
    std::string policy;
    std::string created;
    std::vector<Trajectory> episodes;
};

/// "created" stamp: SOURCE_DATE_EPOCH as UTC ISO-8601 when set, otherwise
/// the epoch, so regenerated files stay byte-identical.
std::string creation_stamp();

std::string serialize_trajectory_file(const TrajectoryFile& file);

/// Throws FormatError on malformed content or when the stored returns do
/// not match the transitions; DatasetEnvMismatch when `expected` differs.
TrajectoryFile parse_trajectory_file(const std::string& text, std::optional<EnvId> expected = std::nullopt);

void write_trajectory_file(const std::filesystem::path& path, const TrajectoryFile& file);
TrajectoryFile read_trajectory_file(const std::filesystem::path& path, std::optional<EnvId> expected = std::nullopt);

}  // namespace arena
