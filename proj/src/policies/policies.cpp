#include "arena/policies/policies.hpp"

#include <string>

#include "arena/core/error.hpp"
#include "arena/policies/tabular.hpp"

namespace arena::policies {

std::string_view to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::random: return "random";
        case PolicyKind::scripted_expert: return "expert";
        case PolicyKind::tabular_optimal: return "tabular";
    }
    return "random";
}

PolicyKind parse_policy_kind(std::string_view text) {
    if (text == "random") return PolicyKind::random;
    if (text == "expert" || text == "scripted_expert") return PolicyKind::scripted_expert;
    if (text == "tabular" || text == "tabular_optimal") return PolicyKind::tabular_optimal;
    throw ConfigError("unknown policy '" + std::string(text) + "'");
}

Action random_action(EnvId env, Rng& rng) {
    const ActionSpace space = action_space(env);
    if (space.is_continuous) return continuous(rng.uniform(space.low, space.high));
    return discrete(static_cast<int>(rng.below(static_cast<std::uint64_t>(space.count))));
}

Action expert_action(EnvId env, const Observation& obs) {
    require_observation(env, obs);
    switch (env) {
        case EnvId::cartpole: {
            const auto& s = std::get<CartPoleObs>(obs);
            return discrete(s.theta + 0.5 * s.omega > 0.0 ? 1 : 0);
        }
        case EnvId::mountaincar: return discrete(std::get<MountainCarObs>(obs).v >= 0.0 ? 2 : 0);
        case EnvId::mountaincar_continuous: return continuous(std::get<MountainCarObs>(obs).v >= 0.0 ? 1.0 : -1.0);
        case EnvId::cliffwalking: {
            // Up from the start, along row 2, down into the goal.
            const auto& s = std::get<CliffWalkingObs>(obs);
            if (s.col == 11) return discrete(2);
            if (s.row == 3) return discrete(0);
            return discrete(1);
        }
        case EnvId::taxi:
        case EnvId::blackjack:
        case EnvId::frozenlake: return discrete(optimal_policy(env).action_for(obs));
    }
    return discrete(0);
}

Trajectory rollout(EnvId env, std::uint64_t seed, const PolicyFn& policy, int step_cap) {
    auto [state, obs] = reset(env, seed, step_cap);
    Trajectory traj{env, seed, {}};
    while (!state.done()) {
        const Action action = policy(obs);
        StepResult r = state.step(action);
        traj.steps.push_back({obs, action, r.reward, r.observation, r.terminated, r.truncated});
        obs = std::move(r.observation);
    }
    return traj;
}

std::uint64_t dataset_episode_seed(std::uint64_t seed, int episode) {
    return mix_seed(seed, static_cast<std::uint64_t>(episode) + 1);
}

std::vector<Trajectory> generate_dataset(PolicyKind policy, EnvId env, int n, std::uint64_t seed, int step_cap) {
    if (policy == PolicyKind::tabular_optimal && !has_tabular_model(env)) {
        throw UnsupportedEnv(std::string(to_string(env)) + " has no tabular model");
    }
    std::vector<Trajectory> episodes;
    for (int i = 0; i < n; ++i) {
        const std::uint64_t episode_seed = dataset_episode_seed(seed, i);
        Rng rng(mix_seed(episode_seed, 0x7261'6e64));
        PolicyFn fn;
        switch (policy) {
            case PolicyKind::random: fn = [&](const Observation&) { return random_action(env, rng); }; break;
            case PolicyKind::scripted_expert: fn = [&](const Observation& o) { return expert_action(env, o); }; break;
            case PolicyKind::tabular_optimal: {
                const TabularPolicy& table = optimal_policy(env);
                fn = [&table](const Observation& o) { return discrete(table.action_for(o)); };
                break;
            }
        }
        episodes.push_back(rollout(env, episode_seed, fn, step_cap));
    }
    return episodes;
}

}  // namespace arena::policies
