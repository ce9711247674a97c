#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "arena/env/types.hpp"
#include "arena/eval/record.hpp"
#include "arena/policies/tabular.hpp"

namespace arena::eval {

/// Solvability (l) and state-of-the-art (h) returns of one environment.
struct Thresholds {
    double solvable = 0.0;
    double sota = 1.0;
};

/// Rows keyed by short env name. Also carries acrobot and lunarlander,
/// which have no simulator here but belong to the reference table.
class ThresholdTable {
public:
    void set(const std::string& env, Thresholds t);
    bool contains(const std::string& env) const { return rows_.count(env) != 0; }
    /// Throws ConfigError for an unknown env.
    const Thresholds& at(const std::string& env) const;
    const Thresholds& at(EnvId env) const { return at(std::string(to_string(env))); }
    const std::map<std::string, Thresholds>& rows() const { return rows_; }

private:
    std::map<std::string, Thresholds> rows_;
};

ThresholdTable default_thresholds();
/// CSV with header "env,solvable,sota". Throws MissingAsset, FormatError.
ThresholdTable load_thresholds(const std::filesystem::path& path);
ThresholdTable parse_thresholds(const std::string& csv);
std::string serialize_thresholds(const ThresholdTable& table);

double undiscounted_return(const Trajectory& traj);

/// (r - l) / (h - l) when r > l, otherwise -1.
double normalize(double r, const Thresholds& t);

struct Aggregate {
    double median = 0.0;
    double iqr = 0.0;
    double max = 0.0;
};

/// Quantile of sorted data with linear interpolation between order statistics.
double quantile_sorted(std::span<const double> sorted, double q);
/// Throws EmptyInput.
Aggregate aggregate(std::span<const double> values);

/// One blackjack hand: the observed states and the 0-based actions taken.
using BlackjackEpisode = std::vector<std::pair<BlackjackObs, int>>;
inline constexpr int kBlackjackGroupSize = 20;

/// Number of hands (out of exactly 20) in which every action equals the
/// oracle's. Throws WrongEpisodeCount.
int blackjack_agreement_score(std::span<const BlackjackEpisode> episodes, const policies::TabularPolicy& oracle);
/// Scores of consecutive groups of 20 hands; the count must be a multiple of 20.
std::vector<int> blackjack_group_scores(std::span<const BlackjackEpisode> episodes,
                                        const policies::TabularPolicy& oracle);

struct SolvabilityCell {
    std::string agent;
    EnvId env = EnvId::cartpole;
    std::string level;
    int seeds = 0;
    double median_normalized = -1.0;
    bool solved = false;
};

struct SolvabilityTable {
    std::vector<SolvabilityCell> cells;              // sorted by (agent, env, level)
    std::map<std::string, int> solved_envs_by_level;  // envs solved by at least one agent
    std::map<std::string, int> solved_envs_by_agent;  // envs solved at any level
    std::map<std::pair<std::string, std::string>, int> solved_envs_by_agent_level;
};

/// A cell is solved when the median normalized score over its seeds is > 0.
/// Records without a score are ignored.
SolvabilityTable solvability_table(std::span<const RunRecord> records, const ThresholdTable& thresholds);

/// Writes results.csv, summary.csv, costs.csv, radar.svg and heatmap.svg.
/// Output is a pure function of the inputs. Throws IoError.
void export_report(std::span<const RunRecord> records, const ThresholdTable& thresholds,
                   const std::filesystem::path& out_dir);

}  // namespace arena::eval
