#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "arena/env/environment.hpp"
#include "arena/ppo/loss.hpp"

namespace arena::ppo {

inline constexpr std::array<double, 3> kGridLr = {1e-3, 1e-4, 1e-5};
inline constexpr std::array<double, 3> kGridGamma = {0.99, 0.95, 0.9};
inline constexpr std::array<double, 3> kGridEntCoef = {0.01, 0.05, 0.1};
inline constexpr std::array<int, 2> kGridRepeat = {10, 20};

struct PpoConfig {
    double lr = 1e-3;
    double gamma = 0.99;
    double ent_coef = 0.01;
    int repeat = 10;
    double clip_eps = 0.2;
    double lambda = 0.95;
    int epochs = 400;
    int traj_per_epoch = 50;
    int minibatch = 256;
    int step_cap = kDefaultStepCap;
    std::uint64_t seed = 0;
    /// Rolling-mean return that stops training; the env's SOTA threshold when unset.
    std::optional<double> target;
    /// Also stop once the greedy policy has met the target for 10 straight epochs.
    bool stop_on_greedy = false;
};

/// All 54 combinations of the grid sets.
std::vector<PpoConfig> full_grid(const PpoConfig& base = {});

/// Configuration used when no grid search is run.
PpoConfig tuned_config(EnvId env);

/// Network input: coordinates scaled to roughly [-1, 1], never one-hot.
int feature_dim(EnvId env);
Vec<double> features(EnvId env, const Observation& obs);

/// Discrete choices; mountaincar_continuous uses throttle {-1, 0, 1}.
int action_count(EnvId env);
Action to_env_action(EnvId env, int choice);

struct EpochStats {
    int epoch = 0;
    double mean_return = 0.0;
    double policy_loss = 0.0;
    double value_loss = 0.0;
    double entropy = 0.0;
    double greedy_return = 0.0;  // most-probable-action episode after the update
};

inline constexpr int kRollingWindow = 10;

template <typename Scalar>
struct TrainResult {
    MlpParams<Scalar> params;
    std::vector<EpochStats> curve;
    double best_rolling_mean = 0.0;  // best 10-epoch mean return
    bool reached_target = false;
};

/// Per epoch: traj_per_epoch sampled episodes, GAE, normalized advantages and
/// `repeat` shuffled minibatch passes of Adam. Stops early once the 10-epoch
/// mean return reaches the target. Deterministic in cfg.seed.
/// Instantiated for float and double.
template <typename Scalar>
TrainResult<Scalar> train_as(EnvId env, const PpoConfig& cfg);

/// Single-precision training, the default.
inline TrainResult<float> train(EnvId env, const PpoConfig& cfg) { return train_as<float>(env, cfg); }

/// Return of one episode taking the most probable action everywhere.
template <typename Scalar>
double greedy_return(const MlpParams<Scalar>& params, EnvId env, std::uint64_t seed,
                     int step_cap = kDefaultStepCap);

/// Mean return of the last min(10, epochs) epochs.
double final_return(const std::vector<EpochStats>& curve);

struct GridRow {
    PpoConfig config;
    std::vector<double> finals;  // one per seed
    double median = 0.0;
};

struct GridResult {
    PpoConfig best;
    std::vector<GridRow> rows;
};

/// Trains every config on every seed (in parallel over `threads`) and picks
/// the config with the largest median final return; earlier rows win ties.
GridResult grid_search(EnvId env, const std::vector<PpoConfig>& grid, const std::vector<std::uint64_t>& seeds,
                       int threads = 4);

std::string grid_csv(const GridResult& result);
std::string curve_csv(const std::vector<EpochStats>& curve);
/// "key=value" lines of every hyperparameter, written next to curves.
std::string describe_config(const PpoConfig& cfg);

/// Portable text checkpoint: a version line, the dims, then each tensor's
/// shape and weights at full precision. load throws FormatError.
template <typename Scalar>
void save_checkpoint(const std::filesystem::path& path, const MlpParams<Scalar>& params);
template <typename Scalar = float>
MlpParams<Scalar> load_checkpoint(const std::filesystem::path& path);

}  // namespace arena::ppo
