#include "arena/env/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace arena::dynamics {

CartPoleObs cartpole_update(const CartPoleObs& s, double force) {
    using C = CartPoleConstants;
    constexpr double total_mass = C::cart_mass + C::pole_mass;
    constexpr double pole_mass_length = C::pole_mass * C::half_length;

    const double cos_t = std::cos(s.theta);
    const double sin_t = std::sin(s.theta);
    const double temp = (force + pole_mass_length * s.omega * s.omega * sin_t) / total_mass;
    const double theta_acc = (C::gravity * sin_t - cos_t * temp) /
                             (C::half_length * (4.0 / 3.0 - C::pole_mass * cos_t * cos_t / total_mass));
    const double x_acc = temp - pole_mass_length * theta_acc * cos_t / total_mass;

    CartPoleObs next;
    next.x = s.x + C::tau * s.v;
    next.v = s.v + C::tau * x_acc;
    next.theta = s.theta + C::tau * s.omega;
    next.omega = s.omega + C::tau * theta_acc;
    return next;
}

bool cartpole_failed(const CartPoleObs& s) {
    using C = CartPoleConstants;
    return s.x < -C::x_limit || s.x > C::x_limit || s.theta < -C::theta_limit || s.theta > C::theta_limit;
}

namespace {
MountainCarObs integrate_hill(const MountainCarObs& s, double acceleration) {
    using C = MountainCarConstants;
    MountainCarObs next;
    next.v = s.v + acceleration - std::cos(3.0 * s.x) * C::gravity;
    next.v = std::clamp(next.v, -C::max_speed, C::max_speed);
    next.x = std::clamp(s.x + next.v, C::min_position, C::max_position);
    if (next.x == C::min_position && next.v < 0.0) next.v = 0.0;
    return next;
}
}  // namespace

MountainCarObs mountaincar_update(const MountainCarObs& s, int action) {
    return integrate_hill(s, (action - 1) * MountainCarConstants::force);
}

MountainCarObs mountaincar_continuous_update(const MountainCarObs& s, double force) {
    const double f = std::clamp(force, -1.0, 1.0);
    return integrate_hill(s, f * MountainCarConstants::continuous_power);
}

bool is_cliff(int row, int col) { return row == kCliffRows - 1 && col >= 1 && col <= kCliffCols - 2; }

GridMove cliffwalking_move(const CliffWalkingObs& s, int action) {
    static constexpr int dr[] = {-1, 0, 1, 0};
    static constexpr int dc[] = {0, 1, 0, -1};
    GridMove move;
    move.next.row = std::clamp(s.row + dr[action], 0, kCliffRows - 1);
    move.next.col = std::clamp(s.col + dc[action], 0, kCliffCols - 1);
    if (is_cliff(move.next.row, move.next.col)) {
        move.next = CliffWalkingObs{3, 0};
        move.reward = -100.0;
        return move;
    }
    move.terminated = move.next.row == kCliffRows - 1 && move.next.col == kCliffCols - 1;
    return move;
}

namespace {
// Gym's Taxi map; a '|' next to a cell blocks the horizontal move.
constexpr std::array<std::string_view, 7> kTaxiMap = {
    "+---------+", "|R: | : :G|", "| : | : : |", "| : : : : |", "| | : | : |", "|Y| : |B: |", "+---------+",
};
}  // namespace

TaxiMove taxi_move(const TaxiObs& s, int action) {
    TaxiMove move;
    move.next = s;
    const int row = s.row;
    const int col = s.col;
    switch (action) {
        case 0: move.next.row = std::min(row + 1, 4); break;
        case 1: move.next.row = std::max(row - 1, 0); break;
        case 2:
            if (kTaxiMap[1 + row][2 * col + 2] == ':') move.next.col = std::min(col + 1, 4);
            break;
        case 3:
            if (kTaxiMap[1 + row][2 * col] == ':') move.next.col = std::max(col - 1, 0);
            break;
        case 4: {
            const auto p = static_cast<int>(s.passenger);
            if (p < 4 && kTaxiLandmarks[p][0] == row && kTaxiLandmarks[p][1] == col) {
                move.next.passenger = TaxiLoc::InTaxi;
            } else {
                move.reward = -10.0;
            }
            break;
        }
        case 5: {
            const auto d = static_cast<int>(s.destination);
            const bool at_dest = kTaxiLandmarks[d][0] == row && kTaxiLandmarks[d][1] == col;
            if (s.passenger == TaxiLoc::InTaxi && at_dest) {
                move.next.passenger = s.destination;
                move.reward = 20.0;
                move.terminated = true;
                break;
            }
            int landmark = -1;
            for (int i = 0; i < 4; ++i) {
                if (kTaxiLandmarks[i][0] == row && kTaxiLandmarks[i][1] == col) landmark = i;
            }
            if (s.passenger == TaxiLoc::InTaxi && landmark >= 0) {
                move.next.passenger = static_cast<TaxiLoc>(landmark);
            } else {
                move.reward = -10.0;
            }
            break;
        }
        default: break;
    }
    return move;
}

int taxi_encode(const TaxiObs& s) {
    return ((s.row * 5 + s.col) * 5 + static_cast<int>(s.passenger)) * 4 + static_cast<int>(s.destination);
}

TaxiObs taxi_decode(int index) {
    TaxiObs s;
    s.destination = static_cast<TaxiLoc>(index % 4);
    index /= 4;
    s.passenger = static_cast<TaxiLoc>(index % 5);
    index /= 5;
    s.col = index % 5;
    s.row = index / 5;
    return s;
}

int draw_card(Rng& rng) {
    const int face = static_cast<int>(rng.below(13)) + 1;
    return std::min(face, 10);
}

double card_probability(int card) {
    if (card < 1 || card > 10) return 0.0;
    return card == 10 ? 4.0 / 13.0 : 1.0 / 13.0;
}

int dealer_play(int visible, int hidden, Rng& rng) {
    Hand dealer;
    dealer.add(visible);
    dealer.add(hidden);
    while (dealer.value() < 17) dealer.add(draw_card(rng));
    return dealer.value();
}

char frozenlake_tile(int cell) { return kFrozenLakeMap[cell / 4][cell % 4]; }

int frozenlake_move(int cell, int action) {
    int row = cell / 4;
    int col = cell % 4;
    switch (action) {
        case 0: col = std::max(col - 1, 0); break;
        case 1: row = std::min(row + 1, 3); break;
        case 2: col = std::min(col + 1, 3); break;
        case 3: row = std::max(row - 1, 0); break;
        default: break;
    }
    return row * 4 + col;
}

std::array<int, 3> frozenlake_slip_directions(int action) {
    return {(action + 3) % 4, action, (action + 1) % 4};
}

}  // namespace arena::dynamics
