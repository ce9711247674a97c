#include "arena/policies/tabular.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <string>

#include "arena/core/error.hpp"
#include "arena/env/dynamics.hpp"

namespace arena::policies {

namespace dyn = dynamics;

namespace {

struct Outcome {
    double prob;
    double reward;
    int next;  // ignored when terminal
    bool terminal;
};

constexpr int kBlackjackMinSum = 4;
constexpr int kBlackjackMaxSum = 21;
constexpr double kTieTolerance = 1e-9;

int action_count(EnvId env) { return action_space(env).count; }

}  // namespace

bool is_absorbing(EnvId env, int state) {
    switch (env) {
        case EnvId::cliffwalking: {
            const int row = state / dyn::kCliffCols, col = state % dyn::kCliffCols;
            return dyn::is_cliff(row, col) || (row == 3 && col == dyn::kCliffCols - 1);
        }
        case EnvId::frozenlake: {
            const char tile = dyn::frozenlake_tile(state);
            return tile == 'H' || tile == 'G';
        }
        default: return false;
    }
}

namespace {

int blackjack_index(int sum, int dealer, bool ace) {
    return ((sum - kBlackjackMinSum) * 10 + dealer - 1) * 2 + (ace ? 1 : 0);
}

// Dealer totals 17..21 and bust, starting from a partial hand.
void dealer_recurse(dyn::Hand hand, double prob, std::array<double, 6>& out) {
    const int value = hand.value();
    if (value > 21) {
        out[5] += prob;
        return;
    }
    if (value >= 17) {
        out[static_cast<std::size_t>(value - 17)] += prob;
        return;
    }
    for (int card = 1; card <= 10; ++card) {
        dyn::Hand next = hand;
        next.add(card);
        dealer_recurse(next, prob * dyn::card_probability(card), out);
    }
}

std::vector<Outcome> outcomes(EnvId env, int state, int action) {
    std::vector<Outcome> result;
    switch (env) {
        case EnvId::cliffwalking: {
            const CliffWalkingObs s{state / dyn::kCliffCols, state % dyn::kCliffCols};
            const auto move = dyn::cliffwalking_move(s, action);
            result.push_back({1.0, move.reward, move.next.row * dyn::kCliffCols + move.next.col, move.terminated});
            break;
        }
        case EnvId::taxi: {
            const auto move = dyn::taxi_move(dyn::taxi_decode(state), action);
            result.push_back({1.0, move.reward, dyn::taxi_encode(move.next), move.terminated});
            break;
        }
        case EnvId::frozenlake: {
            for (int dir : dyn::frozenlake_slip_directions(action)) {
                const int next = dyn::frozenlake_move(state, dir);
                const char tile = dyn::frozenlake_tile(next);
                result.push_back({1.0 / 3.0, tile == 'G' ? 1.0 : 0.0, next, tile == 'G' || tile == 'H'});
            }
            break;
        }
        case EnvId::blackjack: {
            const bool ace = state % 2 == 1;
            const int dealer = state / 2 % 10 + 1;
            const int sum = state / 20 + kBlackjackMinSum;
            if (action == 0) {
                static const auto table = [] {
                    std::array<std::vector<double>, 11> t;
                    for (int v = 1; v <= 10; ++v) t[static_cast<std::size_t>(v)] = dealer_outcome_distribution(v);
                    return t;
                }();
                const auto& dist = table[static_cast<std::size_t>(dealer)];
                double win = dist[5], lose = 0.0, draw = 0.0;
                for (int total = 17; total <= 21; ++total) {
                    const double p = dist[static_cast<std::size_t>(total - 17)];
                    if (sum > total) {
                        win += p;
                    } else if (sum < total) {
                        lose += p;
                    } else {
                        draw += p;
                    }
                }
                result.push_back({win, 1.0, 0, true});
                result.push_back({draw, 0.0, 0, true});
                result.push_back({lose, -1.0, 0, true});
            } else {
                dyn::Hand hand{sum - (ace ? 10 : 0), ace};
                for (int card = 1; card <= 10; ++card) {
                    dyn::Hand next = hand;
                    next.add(card);
                    const double p = dyn::card_probability(card);
                    if (next.bust()) {
                        result.push_back({p, -1.0, 0, true});
                    } else {
                        result.push_back({p, 0.0, blackjack_index(next.value(), dealer, next.usable_ace()), false});
                    }
                }
            }
            break;
        }
        default: throw UnsupportedEnv(std::string(to_string(env)) + " has no tabular model");
    }
    return result;
}

std::size_t greedy(const std::vector<double>& q) {
    std::size_t best = 0;
    for (std::size_t a = 1; a < q.size(); ++a) {
        if (q[a] > q[best] + kTieTolerance) best = a;
    }
    return best;
}

}  // namespace

bool has_tabular_model(EnvId env) {
    return env == EnvId::cliffwalking || env == EnvId::taxi || env == EnvId::blackjack || env == EnvId::frozenlake;
}

int tabular_state_count(EnvId env) {
    switch (env) {
        case EnvId::cliffwalking: return dyn::kCliffRows * dyn::kCliffCols;
        case EnvId::taxi: return 500;
        case EnvId::blackjack: return (kBlackjackMaxSum - kBlackjackMinSum + 1) * 10 * 2;
        case EnvId::frozenlake: return 16;
        default: throw UnsupportedEnv(std::string(to_string(env)) + " has no tabular model");
    }
}

int tabular_state_index(EnvId env, const Observation& obs) {
    require_observation(env, obs);
    switch (env) {
        case EnvId::cliffwalking: {
            const auto& s = std::get<CliffWalkingObs>(obs);
            return s.row * dyn::kCliffCols + s.col;
        }
        case EnvId::taxi: return dyn::taxi_encode(std::get<TaxiObs>(obs));
        case EnvId::blackjack: {
            const auto& s = std::get<BlackjackObs>(obs);
            const int sum = std::clamp(s.player_sum, kBlackjackMinSum, kBlackjackMaxSum);
            return blackjack_index(sum, s.dealer_showing, s.usable_ace);
        }
        case EnvId::frozenlake: return std::get<FrozenLakeObs>(obs).cell;
        default: throw UnsupportedEnv(std::string(to_string(env)) + " has no tabular model");
    }
}

std::vector<double> dealer_outcome_distribution(int visible) {
    std::array<double, 6> out{};
    for (int hidden = 1; hidden <= 10; ++hidden) {
        dyn::Hand hand;
        hand.add(visible);
        hand.add(hidden);
        dealer_recurse(hand, dyn::card_probability(hidden), out);
    }
    return {out.begin(), out.end()};
}

std::vector<double> action_values(EnvId env, int state, const std::vector<double>& values) {
    std::vector<double> q(static_cast<std::size_t>(action_count(env)), 0.0);
    for (int a = 0; a < action_count(env); ++a) {
        double total = 0.0;
        for (const Outcome& o : outcomes(env, state, a)) {
            total += o.prob * (o.reward + (o.terminal ? 0.0 : values[static_cast<std::size_t>(o.next)]));
        }
        q[static_cast<std::size_t>(a)] = total;
    }
    return q;
}

TabularPolicy solve_tabular(EnvId env) {
    const int n = tabular_state_count(env);
    const int actions = action_count(env);

    // Transition tables are built once; the sweep then only does arithmetic.
    std::vector<std::vector<std::vector<Outcome>>> model(static_cast<std::size_t>(n));
    for (int s = 0; s < n; ++s) {
        if (is_absorbing(env, s)) continue;
        for (int a = 0; a < actions; ++a) model[static_cast<std::size_t>(s)].push_back(outcomes(env, s, a));
    }

    TabularPolicy policy;
    policy.env = env;
    policy.values.assign(static_cast<std::size_t>(n), 0.0);
    policy.actions.assign(static_cast<std::size_t>(n), 0);

    std::vector<double> next(policy.values.size(), 0.0);
    constexpr int kMaxSweeps = 1'000'000;
    for (int sweep = 1; sweep <= kMaxSweeps; ++sweep) {
        double residual = 0.0;
        for (std::size_t s = 0; s < model.size(); ++s) {
            if (model[s].empty()) continue;
            double best = -INFINITY;
            for (const auto& outs : model[s]) {
                double total = 0.0;
                for (const Outcome& o : outs) {
                    total += o.prob * (o.reward + (o.terminal ? 0.0 : policy.values[static_cast<std::size_t>(o.next)]));
                }
                best = std::max(best, total);
            }
            next[s] = best;
            residual = std::max(residual, std::abs(best - policy.values[s]));
        }
        policy.values.swap(next);
        policy.iterations = sweep;
        policy.residual = residual;
        if (residual < kValueIterationTolerance) break;
    }

    for (int s = 0; s < n; ++s) {
        if (is_absorbing(env, s)) continue;
        policy.actions[static_cast<std::size_t>(s)] = static_cast<int>(greedy(action_values(env, s, policy.values)));
    }
    return policy;
}

int TabularPolicy::action_for(const Observation& obs) const {
    return actions[static_cast<std::size_t>(tabular_state_index(env, obs))];
}

double TabularPolicy::value_of(const Observation& obs) const {
    return values[static_cast<std::size_t>(tabular_state_index(env, obs))];
}

const TabularPolicy& optimal_policy(EnvId env) {
    static std::mutex mutex;
    static std::map<EnvId, TabularPolicy> cache;
    std::lock_guard lock(mutex);
    auto it = cache.find(env);
    if (it == cache.end()) it = cache.emplace(env, solve_tabular(env)).first;
    return it->second;
}

}  // namespace arena::policies
