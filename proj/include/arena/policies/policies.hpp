#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "arena/core/rng.hpp"
#include "arena/env/environment.hpp"
#include "arena/env/types.hpp"

namespace arena::policies {

enum class PolicyKind { random, scripted_expert, tabular_optimal };

std::string_view to_string(PolicyKind kind);
/// Accepts "random", "expert"/"scripted_expert", "tabular"/"tabular_optimal"; throws ConfigError.
PolicyKind parse_policy_kind(std::string_view text);

/// Uniform over the discrete actions, or over [-1, 1] for continuous control.
Action random_action(EnvId env, Rng& rng);

/// Scripted controllers for the control tasks and cliffwalking; the tabular
/// optimum for taxi, blackjack and frozenlake. Throws ObservationEnvMismatch.
Action expert_action(EnvId env, const Observation& obs);

using PolicyFn = std::function<Action(const Observation&)>;

/// One full episode from reset(env, seed) until termination or truncation.
Trajectory rollout(EnvId env, std::uint64_t seed, const PolicyFn& policy, int step_cap = kDefaultStepCap);

/// Seed of the i-th episode of a dataset generated with `seed`.
std::uint64_t dataset_episode_seed(std::uint64_t seed, int episode);

/// n seeded rollouts of the given policy. tabular_optimal throws
/// UnsupportedEnv on continuous-state envs.
std::vector<Trajectory> generate_dataset(PolicyKind policy, EnvId env, int n, std::uint64_t seed,
                                         int step_cap = kDefaultStepCap);

}  // namespace arena::policies
