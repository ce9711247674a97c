#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace arena {

enum class EnvId {
    cartpole,
    mountaincar,
    mountaincar_continuous,
    cliffwalking,
    taxi,
    blackjack,
    frozenlake,
};

inline constexpr std::array<EnvId, 7> kAllEnvs = {
    EnvId::cartpole,     EnvId::mountaincar, EnvId::mountaincar_continuous, EnvId::cliffwalking,
    EnvId::taxi,         EnvId::blackjack,   EnvId::frozenlake,
};

/// Short identifier used in configs, file names and CSVs ("cliffwalking").
std::string_view to_string(EnvId id);
/// Registered Gym name ("CliffWalking-v0"), used in reports and threshold tables.
std::string_view gym_name(EnvId id);
/// Accepts either the short identifier or the Gym name; throws ConfigError.
EnvId parse_env_id(std::string_view text);

// ---------------------------------------------------------------------------
// Observations

struct CartPoleObs {
    double x = 0.0;      // m
    double v = 0.0;      // m/s
    double theta = 0.0;  // rad
    double omega = 0.0;  // rad/s
    bool operator==(const CartPoleObs&) const = default;
};

/// Shared by the discrete and continuous mountain car.
struct MountainCarObs {
    double x = 0.0;
    double v = 0.0;
    bool operator==(const MountainCarObs&) const = default;
};

struct CliffWalkingObs {
    int row = 3;  // 0..3
    int col = 0;  // 0..11
    bool operator==(const CliffWalkingObs&) const = default;
};

/// Taxi landmark; InTaxi is only valid for the passenger.
enum class TaxiLoc { R = 0, G = 1, Y = 2, B = 3, InTaxi = 4 };

struct TaxiObs {
    int row = 0;  // 0..4
    int col = 0;  // 0..4
    TaxiLoc passenger = TaxiLoc::R;
    TaxiLoc destination = TaxiLoc::G;
    bool operator==(const TaxiObs&) const = default;
};

struct BlackjackObs {
    int player_sum = 4;      // 4..31
    int dealer_showing = 1;  // 1..10
    bool usable_ace = false;
    bool operator==(const BlackjackObs&) const = default;
};

struct FrozenLakeObs {
    int cell = 0;  // 0..15, row-major on the 4x4 map
    bool operator==(const FrozenLakeObs&) const = default;
};

using Observation =
    std::variant<CartPoleObs, MountainCarObs, CliffWalkingObs, TaxiObs, BlackjackObs, FrozenLakeObs>;

/// True when the observation alternative is the one produced by `id`.
bool observation_matches(EnvId id, const Observation& obs);
/// Throws ObservationEnvMismatch unless observation_matches.
void require_observation(EnvId id, const Observation& obs);

// ---------------------------------------------------------------------------
// Actions

struct DiscreteAction {
    int index = 0;  // 0-based
    bool operator==(const DiscreteAction&) const = default;
};

struct ContinuousAction {
    double force = 0.0;  // clamped to [-1, 1] when applied
    bool operator==(const ContinuousAction&) const = default;
};

using Action = std::variant<DiscreteAction, ContinuousAction>;

inline Action discrete(int index) { return DiscreteAction{index}; }
inline Action continuous(double force) { return ContinuousAction{force}; }

struct ActionSpace {
    bool is_continuous = false;
    int count = 0;  // discrete only
    double low = 0.0;
    double high = 0.0;  // continuous only
    bool operator==(const ActionSpace&) const = default;
};

ActionSpace action_space(EnvId id);

/// Throws InvalidAction when `action` does not belong to the env's space.
void validate_action(EnvId id, const Action& action);

// ---------------------------------------------------------------------------
// Steps and trajectories

struct StepResult {
    Observation observation;
    double reward = 0.0;
    bool terminated = false;
    bool truncated = false;
};

struct Transition {
    Observation state;
    Action action;
    double reward = 0.0;
    Observation next_state;
    bool terminated = false;
    bool truncated = false;
};

struct Trajectory {
    EnvId env = EnvId::cartpole;
    std::uint64_t seed = 0;
    std::vector<Transition> steps;

    bool empty() const { return steps.empty(); }
    std::size_t size() const { return steps.size(); }
};

}  // namespace arena
