#include "arena/grounding/grounding.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "arena/core/assets.hpp"
#include "arena/core/error.hpp"

namespace arena::grounding {

namespace {

std::string fixed(double value, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
    return buf;
}

std::string landmark_text(TaxiLoc loc) {
    switch (loc) {
        case TaxiLoc::R: return "R [0, 0]";
        case TaxiLoc::G: return "G [0, 4]";
        case TaxiLoc::Y: return "Y [4, 0]";
        case TaxiLoc::B: return "B [4, 3]";
        case TaxiLoc::InTaxi: return "in the taxi";
    }
    return "";
}

std::string asset_for(EnvId env, const char* kind) {
    return std::string(embedded_asset("grounding/" + std::string(to_string(env)) + "/" + kind + ".txt"));
}

}  // namespace

std::string translate_observation(EnvId env, const Observation& obs) {
    require_observation(env, obs);
    switch (env) {
        case EnvId::cartpole: {
            const auto& s = std::get<CartPoleObs>(obs);
            const char* cart_dir = s.v > 0 ? "right" : "left";
            const char* pole_dir = s.omega > 0 ? "right" : "left";
            return "The cart is positioned at " + fixed(s.x, 3) + ", with a velocity of " + fixed(std::abs(s.v), 2) +
                   " towards the " + cart_dir + ". The pole is tilted at " + fixed(std::abs(s.theta), 2) +
                   " radians, rotating at " + fixed(std::abs(s.omega), 2) + " radians per second towards the " +
                   pole_dir + ".";
        }
        case EnvId::mountaincar:
        case EnvId::mountaincar_continuous: {
            const auto& s = std::get<MountainCarObs>(obs);
            return "The car is positioned at " + fixed(s.x, 3) + ", with a velocity of " + fixed(std::abs(s.v), 3) +
                   " towards the " + (s.v > 0 ? "right" : "left") + ".";
        }
        case EnvId::cliffwalking: {
            const auto& s = std::get<CliffWalkingObs>(obs);
            return "The player is at location [" + std::to_string(s.row) + ", " + std::to_string(s.col) +
                   "] in the grid world.";
        }
        case EnvId::taxi: {
            const auto& s = std::get<TaxiObs>(obs);
            std::string text = "The taxi is at location [" + std::to_string(s.row) + ", " + std::to_string(s.col) +
                               "] in the grid world. ";
            if (s.passenger == TaxiLoc::InTaxi) {
                text += "The passenger is in the taxi";
            } else {
                text += "The passenger is waiting at " + landmark_text(s.passenger);
            }
            return text + ", and the destination is " + landmark_text(s.destination) + ".";
        }
        case EnvId::blackjack: {
            const auto& s = std::get<BlackjackObs>(obs);
            return "The player's current sum is " + std::to_string(s.player_sum) + ", the dealer is showing " +
                   std::to_string(s.dealer_showing) + ", and the player has a usable ace: " +
                   (s.usable_ace ? "yes" : "no") + ".";
        }
        case EnvId::frozenlake: {
            const auto& s = std::get<FrozenLakeObs>(obs);
            return "The player is at location [" + std::to_string(s.cell / 4) + ", " + std::to_string(s.cell % 4) +
                   "] on the frozen lake.";
        }
    }
    return {};
}

std::string describe_game(EnvId env) { return asset_for(env, "game"); }
std::string describe_goal(EnvId env) { return asset_for(env, "goal"); }
std::string describe_action(EnvId env) { return asset_for(env, "action"); }

std::vector<int> valid_action_numbers(EnvId env) {
    const ActionSpace space = action_space(env);
    std::vector<int> numbers;
    for (int i = 1; i <= space.count; ++i) numbers.push_back(i);
    return numbers;
}

std::string describe_taken_action(EnvId env, const Action& action) {
    if (const auto* c = std::get_if<ContinuousAction>(&action)) {
        return "Apply force " + fixed(c->force, 2);
    }
    const int n = std::get<DiscreteAction>(action).index;
    static const char* const cartpole[] = {"Push left", "Push right"};
    static const char* const mountaincar[] = {"Accelerate to the left", "Do not accelerate",
                                              "Accelerate to the right"};
    static const char* const cliff[] = {"Move up", "Move right", "Move down", "Move left"};
    static const char* const taxi[] = {"Move south", "Move north", "Move east", "Move west",
                                       "Pick up the passenger", "Drop off the passenger"};
    static const char* const blackjack[] = {"Stick", "Hit"};
    static const char* const lake[] = {"Move left", "Move down", "Move right", "Move up"};
    const char* verb = "Action";
    switch (env) {
        case EnvId::cartpole: verb = cartpole[n]; break;
        case EnvId::mountaincar: verb = mountaincar[n]; break;
        case EnvId::cliffwalking: verb = cliff[n]; break;
        case EnvId::taxi: verb = taxi[n]; break;
        case EnvId::blackjack: verb = blackjack[n]; break;
        case EnvId::frozenlake: verb = lake[n]; break;
        case EnvId::mountaincar_continuous: break;
    }
    return std::string(verb) + " (" + std::to_string(n + 1) + ")";
}

TextBundle make_bundle(EnvId env, const Observation& obs) {
    return {describe_game(env), describe_goal(env), describe_action(env), translate_observation(env, obs)};
}

std::string format_reward(double reward) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, reward);
    std::string text(buf, res.ptr);
    if (std::isfinite(reward) && text.find_first_of(".e") == std::string::npos) text += ".0";
    return text;
}

std::vector<std::string> translate_transitions(EnvId env, std::span<const Transition> transitions,
                                               bool is_current) {
    if (transitions.empty()) throw EmptyList("translate_transitions needs at least one transition");
    if (is_current) return {translate_observation(env, transitions.back().next_state)};
    std::vector<std::string> lines;
    lines.reserve(transitions.size());
    for (const Transition& t : transitions) {
        lines.push_back(translate_observation(env, t.state) + ".\n Take Action: " +
                        describe_taken_action(env, t.action) + ". \n Result: Reward of " + format_reward(t.reward) +
                        ",  \n Transit to " + translate_observation(env, t.next_state));
    }
    return lines;
}

}  // namespace arena::grounding
