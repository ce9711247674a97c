#pragma once

// Per-environment transition functions. Deterministic pieces are exposed as
// pure functions so the tabular solvers and tests can reuse them; stochastic
// pieces take the generator explicitly.

#include <array>
#include <string_view>

#include "arena/core/rng.hpp"
#include "arena/env/types.hpp"

namespace arena::dynamics {

// --- CartPole --------------------------------------------------------------

struct CartPoleConstants {
    static constexpr double gravity = 9.8;
    static constexpr double cart_mass = 1.0;
    static constexpr double pole_mass = 0.1;
    static constexpr double half_length = 0.5;
    static constexpr double force_mag = 10.0;
    static constexpr double tau = 0.02;
    static constexpr double x_limit = 2.4;
    static constexpr double theta_limit = 0.2095;
};

/// One explicit Euler step under a horizontal force of +-10 N.
CartPoleObs cartpole_update(const CartPoleObs& s, double force);
bool cartpole_failed(const CartPoleObs& s);

// --- MountainCar -----------------------------------------------------------

struct MountainCarConstants {
    static constexpr double min_position = -1.2;
    static constexpr double max_position = 0.6;
    static constexpr double max_speed = 0.07;
    static constexpr double goal_position = 0.5;
    static constexpr double continuous_goal_position = 0.45;
    static constexpr double force = 0.001;
    static constexpr double continuous_power = 0.0015;
    static constexpr double gravity = 0.0025;
};

/// action: 0 push left, 1 no push, 2 push right.
MountainCarObs mountaincar_update(const MountainCarObs& s, int action);
/// force is clamped to [-1, 1] before use.
MountainCarObs mountaincar_continuous_update(const MountainCarObs& s, double force);

// --- CliffWalking ----------------------------------------------------------

inline constexpr int kCliffRows = 4;
inline constexpr int kCliffCols = 12;

struct GridMove {
    CliffWalkingObs next;
    double reward = -1.0;
    bool terminated = false;
};

bool is_cliff(int row, int col);
/// action: 0 up, 1 right, 2 down, 3 left. Entering the cliff costs -100 and
/// returns to (3, 0) without ending the episode; the goal (3, 11) ends it.
GridMove cliffwalking_move(const CliffWalkingObs& s, int action);

// --- Taxi ------------------------------------------------------------------

struct TaxiMove {
    TaxiObs next;
    double reward = -1.0;
    bool terminated = false;
};

/// Landmark coordinates (row, col) for R, G, Y, B.
inline constexpr std::array<std::array<int, 2>, 4> kTaxiLandmarks = {{{0, 0}, {0, 4}, {4, 0}, {4, 3}}};

/// action: 0 south, 1 north, 2 east, 3 west, 4 pickup, 5 dropoff.
TaxiMove taxi_move(const TaxiObs& s, int action);
/// Dense index in [0, 500): ((row*5 + col)*5 + passenger)*4 + destination.
int taxi_encode(const TaxiObs& s);
TaxiObs taxi_decode(int index);

// --- Blackjack -------------------------------------------------------------

/// Draw from the infinite deck: 1..9 uniformly, 10 with weight 4/13.
int draw_card(Rng& rng);
/// Probability of drawing `card` (1..10).
double card_probability(int card);

/// A hand summarised by its hard total (aces as 1) and whether it holds an ace.
struct Hand {
    int hard_total = 0;
    bool has_ace = false;

    void add(int card) {
        hard_total += card;
        has_ace = has_ace || card == 1;
    }
    bool usable_ace() const { return has_ace && hard_total + 10 <= 21; }
    int value() const { return usable_ace() ? hard_total + 10 : hard_total; }
    bool bust() const { return value() > 21; }
};

/// Dealer draws until reaching 17 or more, one ace counted as 11 while that
/// keeps the total at or below 21. Returns the final total (may exceed 21).
int dealer_play(int visible, int hidden, Rng& rng);

// --- FrozenLake ------------------------------------------------------------

inline constexpr std::array<std::string_view, 4> kFrozenLakeMap = {"SFFF", "FHFH", "FFFH", "HFFG"};

char frozenlake_tile(int cell);
/// Deterministic move; action 0 left, 1 down, 2 right, 3 up. Walls hold position.
int frozenlake_move(int cell, int action);
/// Intended direction and its two perpendiculars, each taken with probability 1/3.
std::array<int, 3> frozenlake_slip_directions(int action);

}  // namespace arena::dynamics
