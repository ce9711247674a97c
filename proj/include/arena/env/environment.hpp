#pragma once

#include <cstdint>
#include <utility>
#include <variant>

#include "arena/core/rng.hpp"
#include "arena/env/dynamics.hpp"
#include "arena/env/types.hpp"

namespace arena {

inline constexpr int kDefaultStepCap = 200;

struct BlackjackPhys {
    dynamics::Hand player;
    int dealer_visible = 1;
    int dealer_hidden = 1;
};

using EnvPhys =
    std::variant<CartPoleObs, MountainCarObs, CliffWalkingObs, TaxiObs, BlackjackPhys, FrozenLakeObs>;

/// Simulator state of one episode. Single-threaded; movable between threads
/// between calls.
class Environment {
public:
    /// Starts an episode; step_cap < 1 is raised to 1.
    static std::pair<Environment, Observation> reset(EnvId id, std::uint64_t seed,
                                                     int step_cap = kDefaultStepCap);

    StepResult step(const Action& action);

    EnvId id() const { return id_; }
    int step_count() const { return step_count_; }
    int step_cap() const { return step_cap_; }
    bool done() const { return done_; }
    Observation observation() const;
    const EnvPhys& phys() const { return phys_; }

private:
    Environment(EnvId id, std::uint64_t seed, int step_cap);

    EnvId id_;
    Rng rng_;
    EnvPhys phys_;
    int step_count_ = 0;
    int step_cap_ = kDefaultStepCap;
    bool done_ = false;
};

inline std::pair<Environment, Observation> reset(EnvId id, std::uint64_t seed,
                                                 int step_cap = kDefaultStepCap) {
    return Environment::reset(id, seed, step_cap);
}

inline StepResult step(Environment& env, const Action& action) { return env.step(action); }

}  // namespace arena
