#pragma once

#include <span>
#include <vector>

#include "ehaloha/channel.hpp"
#include "ehaloha/markov.hpp"
#include "ehaloha/scenario.hpp"
#include "ehaloha/strategy.hpp"

namespace ehaloha {

/// Position of process-battery state (x,b) in the fixed order
/// (0,0),...,(0,E),(1,0),...,(1,E).
constexpr int pb_index(int x, int b, int battery_capacity) {
    return x * (battery_capacity + 1) + b;
}

/// Battery kernel after a transmission (all energy spent, then one harvest
/// draw with the new state's rate): b = 0 w.p. 1-gamma, b = 1 w.p. gamma.
double phi_transmit(int b, double gamma);

/// Battery kernel without a transmission; harvesting pauses at a full
/// battery.
double phi_no_transmit(int b_prev, int b, double gamma, int battery_capacity);

/// One-slot transition of the process-battery chain (X,B):
/// q_{x'x} [ pi^{(x'x)}_{b'} phi_trans_b + (1 - pi^{(x'x)}_{b'}) phi_notrans_{b'->b} ].
double process_battery_transition(int x_prev, int b_prev, int x, int b, const Scenario& sc,
                                  const Strategy& st);

/// The 2(E+1)-state chain (X,B) with its steady state nu.
struct ProcessBatteryChain {
    markov::StochasticMatrix P;
    Eigen::VectorXd nu;
};

ProcessBatteryChain build_process_battery_chain(const Scenario& sc, const Strategy& st);

/// One-slot transition of the (X, X_hat, B) estimate chain given the success
/// probability of this slot's (potential) transmission. Implements all eight
/// cases, including the structural zeros where the estimate would change
/// without a delivered update.
double estimate_chain_transition(int x_prev, int xhat_prev, int b_prev, int x, int xhat, int b,
                                 const Scenario& sc, const Strategy& st, double omega_b_prev);

// --- Oracle tier: exact profile and per-device chains at tiny scale. ---
//
// These constructions enumerate the full combinatorial state space and are
// guarded to U-1 <= 6 and E <= 2; their only purpose is validating the
// profile-averaged analysis at scales where exact enumeration is feasible.

/// All profiles ell (counts per process-battery category) summing to U-1,
/// in lexicographic order. Count is C(U+2E, 2E+1).
std::vector<std::vector<long>> enumerate_profiles(int num_other_devices, int battery_capacity);

/// Rank of a profile in enumerate_profiles order.
long profile_rank(std::span<const long> counts);

/// Transition probability of the other-device profile chain: the sum over
/// all flow matrices u of per-device Eq.-level probabilities times the
/// multinomial flow counts.
double profile_transition(std::span<const long> from, std::span<const long> to,
                          const Scenario& sc, const Strategy& st);

struct ProfileChain {
    std::vector<std::vector<long>> profiles;
    markov::StochasticMatrix P;
};

ProfileChain build_profile_chain(const Scenario& sc, const Strategy& st);

/// Full per-device chain over (x, xhat, b, ell): the product of the profile
/// kernel and the estimate-chain kernel conditioned on the previous profile.
struct FullChainG {
    std::vector<std::vector<long>> profiles;
    markov::StochasticMatrix P;
    int battery_capacity;

    int num_profiles() const { return static_cast<int>(profiles.size()); }
    int state_index(int x, int xhat, int b, int ell_idx) const {
        return ((2 * x + xhat) * (battery_capacity + 1) + b) * num_profiles() + ell_idx;
    }
};

FullChainG build_full_chain(const Scenario& sc, const Strategy& st, const DecodingModel& model);

} // namespace ehaloha
