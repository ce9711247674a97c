#include "arena/env/types.hpp"

#include <cmath>

#include "arena/core/error.hpp"

namespace arena {

std::string_view to_string(EnvId id) {
    switch (id) {
        case EnvId::cartpole: return "cartpole";
        case EnvId::mountaincar: return "mountaincar";
        case EnvId::mountaincar_continuous: return "mountaincar_continuous";
        case EnvId::cliffwalking: return "cliffwalking";
        case EnvId::taxi: return "taxi";
        case EnvId::blackjack: return "blackjack";
        case EnvId::frozenlake: return "frozenlake";
    }
    return "unknown";
}

std::string_view gym_name(EnvId id) {
    switch (id) {
        case EnvId::cartpole: return "CartPole-v0";
        case EnvId::mountaincar: return "MountainCar-v0";
        case EnvId::mountaincar_continuous: return "MountainCarContinuous-v0";
        case EnvId::cliffwalking: return "CliffWalking-v0";
        case EnvId::taxi: return "Taxi-v3";
        case EnvId::blackjack: return "Blackjack-v1";
        case EnvId::frozenlake: return "FrozenLake-v1";
    }
    return "unknown";
}

EnvId parse_env_id(std::string_view text) {
    for (EnvId id : kAllEnvs) {
        if (text == to_string(id) || text == gym_name(id)) return id;
    }
    throw ConfigError("unknown environment '" + std::string(text) + "'");
}

bool observation_matches(EnvId id, const Observation& obs) {
    switch (id) {
        case EnvId::cartpole: return std::holds_alternative<CartPoleObs>(obs);
        case EnvId::mountaincar:
        case EnvId::mountaincar_continuous: return std::holds_alternative<MountainCarObs>(obs);
        case EnvId::cliffwalking: return std::holds_alternative<CliffWalkingObs>(obs);
        case EnvId::taxi: return std::holds_alternative<TaxiObs>(obs);
        case EnvId::blackjack: return std::holds_alternative<BlackjackObs>(obs);
        case EnvId::frozenlake: return std::holds_alternative<FrozenLakeObs>(obs);
    }
    return false;
}

void require_observation(EnvId id, const Observation& obs) {
    if (!observation_matches(id, obs)) {
        throw ObservationEnvMismatch("observation does not belong to " + std::string(to_string(id)));
    }
}

ActionSpace action_space(EnvId id) {
    switch (id) {
        case EnvId::cartpole: return {.count = 2};
        case EnvId::mountaincar: return {.count = 3};
        case EnvId::mountaincar_continuous: return {.is_continuous = true, .low = -1.0, .high = 1.0};
        case EnvId::cliffwalking: return {.count = 4};
        case EnvId::taxi: return {.count = 6};
        case EnvId::blackjack: return {.count = 2};
        case EnvId::frozenlake: return {.count = 4};
    }
    return {};
}

void validate_action(EnvId id, const Action& action) {
    const ActionSpace space = action_space(id);
    if (space.is_continuous) {
        const auto* c = std::get_if<ContinuousAction>(&action);
        if (c == nullptr) {
            throw InvalidAction(std::string(to_string(id)) + " expects a continuous action");
        }
        if (!std::isfinite(c->force)) throw InvalidAction("continuous action is not finite");
        return;
    }
    const auto* d = std::get_if<DiscreteAction>(&action);
    if (d == nullptr) {
        throw InvalidAction(std::string(to_string(id)) + " expects a discrete action");
    }
    if (d->index < 0 || d->index >= space.count) {
        throw InvalidAction("action index " + std::to_string(d->index) + " out of range for " +
                            std::string(to_string(id)));
    }
}

}  // namespace arena
