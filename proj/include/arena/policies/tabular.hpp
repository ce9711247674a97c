#pragma once

#include <vector>

#include "arena/env/types.hpp"

namespace arena::policies {

/// Exact greedy policy of a finite MDP, solved by value iteration.
struct TabularPolicy {
    EnvId env = EnvId::cliffwalking;
    std::vector<int> actions;    // 0-based greedy action per state index
    std::vector<double> values;  // optimal state values, gamma = 1
    int iterations = 0;
    double residual = 0.0;

    /// Throws ObservationEnvMismatch.
    int action_for(const Observation& obs) const;
    double value_of(const Observation& obs) const;
};

bool has_tabular_model(EnvId env);

/// Number of indexed states; throws UnsupportedEnv.
int tabular_state_count(EnvId env);

/// Index layouts:
///   cliffwalking  row * 12 + col
///   taxi          Gym encoding ((row * 5 + col) * 5 + passenger) * 4 + destination
///   blackjack     ((player_sum - 4) * 10 + dealer_showing - 1) * 2 + usable_ace, sums 4..21
///   frozenlake    cell
int tabular_state_index(EnvId env, const Observation& obs);

/// Terminal cells (cliff cells, the cliffwalking goal, frozenlake holes and
/// goal); their value is fixed at 0.
bool is_absorbing(EnvId env, int state);

inline constexpr double kValueIterationTolerance = 1e-10;

/// Value iteration over the analytically enumerated MDP until the largest
/// backup change is below kValueIterationTolerance. Ties between actions go
/// to the smallest index. Throws UnsupportedEnv for continuous-state envs.
TabularPolicy solve_tabular(EnvId env);

/// Solved once per process and shared; safe to call from any thread.
const TabularPolicy& optimal_policy(EnvId env);

/// Q-values of every action in `state` under `values`, used by the solver
/// and by the fixed-point property test.
std::vector<double> action_values(EnvId env, int state, const std::vector<double>& values);

/// Dealer final-total distribution for a visible card under the infinite
/// deck: index 0..4 = totals 17..21, index 5 = bust.
std::vector<double> dealer_outcome_distribution(int visible);

}  // namespace arena::policies
