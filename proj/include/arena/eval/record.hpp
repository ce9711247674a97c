#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "arena/env/types.hpp"

namespace arena::eval {

enum class RunStatus { completed, failed, skipped };

std::string_view to_string(RunStatus status);
RunStatus parse_run_status(std::string_view text);

/// Result of one (agent, env, level, seed) cell.
struct RunRecord {
    std::string agent;
    EnvId env = EnvId::cartpole;
    std::string level;
    std::uint64_t seed = 0;
    /// Episode returns in order; for blackjack, agreement scores of 20-hand groups.
    std::vector<double> returns;
    long long prompt_tokens = 0;
    long long completion_tokens = 0;
    int calls = 0;
    double cost = 0.0;
    double wall_time_s = 0.0;
    RunStatus status = RunStatus::completed;
    std::string note;

    /// Score used for aggregation: the last episode return (the final
    /// episode for lv3). Requires non-empty returns.
    double score() const;
    bool has_score() const { return status == RunStatus::completed && !returns.empty(); }
};

std::string serialize_record(const RunRecord& record);
/// Throws FormatError.
RunRecord parse_record(std::string_view text);

}  // namespace arena::eval
