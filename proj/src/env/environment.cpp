#include "arena/env/environment.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "arena/core/error.hpp"

namespace arena {

namespace dyn = dynamics;

Environment::Environment(EnvId id, std::uint64_t seed, int step_cap)
    : id_(id), rng_(seed), step_cap_(std::max(step_cap, 1)) {}

std::pair<Environment, Observation> Environment::reset(EnvId id, std::uint64_t seed, int step_cap) {
    Environment env(id, seed, step_cap);
    Rng& rng = env.rng_;
    switch (id) {
        case EnvId::cartpole: {
            CartPoleObs s;
            s.x = rng.uniform(-0.05, 0.05);
            s.v = rng.uniform(-0.05, 0.05);
            s.theta = rng.uniform(-0.05, 0.05);
            s.omega = rng.uniform(-0.05, 0.05);
            env.phys_ = s;
            break;
        }
        case EnvId::mountaincar:
        case EnvId::mountaincar_continuous:
            env.phys_ = MountainCarObs{rng.uniform(-0.6, -0.4), 0.0};
            break;
        case EnvId::cliffwalking: env.phys_ = CliffWalkingObs{3, 0}; break;
        case EnvId::taxi: {
            // Uniform over taxi cell x passenger landmark x distinct destination.
            auto k = static_cast<int>(rng.below(25 * 4 * 3));
            const int cell = k / 12;
            k %= 12;
            const int passenger = k / 3;
            int destination = k % 3;
            if (destination >= passenger) ++destination;
            env.phys_ = TaxiObs{cell / 5, cell % 5, static_cast<TaxiLoc>(passenger),
                                static_cast<TaxiLoc>(destination)};
            break;
        }
        case EnvId::blackjack: {
            BlackjackPhys b;
            b.dealer_visible = dyn::draw_card(rng);
            b.dealer_hidden = dyn::draw_card(rng);
            b.player.add(dyn::draw_card(rng));
            b.player.add(dyn::draw_card(rng));
            env.phys_ = b;
            break;
        }
        case EnvId::frozenlake: env.phys_ = FrozenLakeObs{0}; break;
    }
    Observation obs = env.observation();
    return {std::move(env), std::move(obs)};
}

Observation Environment::observation() const {
    return std::visit(
        [](const auto& p) -> Observation {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, BlackjackPhys>) {
                return BlackjackObs{p.player.value(), p.dealer_visible, p.player.usable_ace()};
            } else {
                return p;
            }
        },
        phys_);
}

StepResult Environment::step(const Action& action) {
    if (done_) throw SteppedAfterEnd(std::string(to_string(id_)) + " episode already ended");
    validate_action(id_, action);

    StepResult result;
    switch (id_) {
        case EnvId::cartpole: {
            const int a = std::get<DiscreteAction>(action).index;
            const double force = a == 1 ? dyn::CartPoleConstants::force_mag : -dyn::CartPoleConstants::force_mag;
            auto& s = std::get<CartPoleObs>(phys_);
            s = dyn::cartpole_update(s, force);
            result.reward = 1.0;
            result.terminated = dyn::cartpole_failed(s);
            break;
        }
        case EnvId::mountaincar: {
            auto& s = std::get<MountainCarObs>(phys_);
            s = dyn::mountaincar_update(s, std::get<DiscreteAction>(action).index);
            result.reward = -1.0;
            result.terminated = s.x >= dyn::MountainCarConstants::goal_position && s.v >= 0.0;
            break;
        }
        case EnvId::mountaincar_continuous: {
            auto& s = std::get<MountainCarObs>(phys_);
            const double force = std::clamp(std::get<ContinuousAction>(action).force, -1.0, 1.0);
            s = dyn::mountaincar_continuous_update(s, force);
            result.terminated = s.x >= dyn::MountainCarConstants::continuous_goal_position && s.v >= 0.0;
            result.reward = -0.1 * force * force + (result.terminated ? 100.0 : 0.0);
            break;
        }
        case EnvId::cliffwalking: {
            auto& s = std::get<CliffWalkingObs>(phys_);
            const auto move = dyn::cliffwalking_move(s, std::get<DiscreteAction>(action).index);
            s = move.next;
            result.reward = move.reward;
            result.terminated = move.terminated;
            break;
        }
        case EnvId::taxi: {
            auto& s = std::get<TaxiObs>(phys_);
            const auto move = dyn::taxi_move(s, std::get<DiscreteAction>(action).index);
            s = move.next;
            result.reward = move.reward;
            result.terminated = move.terminated;
            break;
        }
        case EnvId::blackjack: {
            auto& b = std::get<BlackjackPhys>(phys_);
            if (std::get<DiscreteAction>(action).index == 1) {
                b.player.add(dyn::draw_card(rng_));
                if (b.player.bust()) {
                    result.reward = -1.0;
                    result.terminated = true;
                }
            } else {
                const int dealer = dyn::dealer_play(b.dealer_visible, b.dealer_hidden, rng_);
                const int player_score = b.player.value();
                const int dealer_score = dealer > 21 ? 0 : dealer;
                result.reward = player_score > dealer_score ? 1.0 : (player_score < dealer_score ? -1.0 : 0.0);
                result.terminated = true;
            }
            break;
        }
        case EnvId::frozenlake: {
            auto& s = std::get<FrozenLakeObs>(phys_);
            const auto dirs = dyn::frozenlake_slip_directions(std::get<DiscreteAction>(action).index);
            s.cell = dyn::frozenlake_move(s.cell, dirs[rng_.below(3)]);
            const char tile = dyn::frozenlake_tile(s.cell);
            result.reward = tile == 'G' ? 1.0 : 0.0;
            result.terminated = tile == 'G' || tile == 'H';
            break;
        }
    }
    ++step_count_;
    result.truncated = !result.terminated && step_count_ >= step_cap_;
    done_ = result.terminated || result.truncated;
    result.observation = observation();
    return result;
}

}  // namespace arena
