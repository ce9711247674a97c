#pragma once

#include <span>
#include <string>
#include <vector>

#include "arena/env/types.hpp"

namespace arena::grounding {

/// The four strings an agent sees about an environment and its current state.
struct TextBundle {
    std::string game_description;
    std::string goal_description;
    std::string action_description;
    std::string observation_text;
};

/// Observation sentence for one state. Throws ObservationEnvMismatch.
std::string translate_observation(EnvId env, const Observation& obs);

/// Fixed per-environment descriptions, loaded from the golden asset files
/// assets/grounding/<env>/{game,goal,action}.txt.
std::string describe_game(EnvId env);
std::string describe_goal(EnvId env);
std::string describe_action(EnvId env);

/// Short verb phrase for an action, e.g. "Push right (2)" for cartpole.
/// Numbers shown to the model are 1-based.
std::string describe_taken_action(EnvId env, const Action& action);

/// Valid 1-based action numbers as shown in the action description.
std::vector<int> valid_action_numbers(EnvId env);

TextBundle make_bundle(EnvId env, const Observation& obs);

/// Python-style rendering of a reward: integral values keep a trailing ".0".
std::string format_reward(double reward);

/// One line per transition:
/// "{state}.\n Take Action: {action}. \n Result: Reward of {r},  \n Transit to {next}".
/// With is_current only the last next-state sentence is returned.
/// Throws EmptyList.
std::vector<std::string> translate_transitions(EnvId env, std::span<const Transition> transitions,
                                               bool is_current = false);

}  // namespace arena::grounding
