#pragma once

#include <vector>

#include "ehaloha/channel.hpp"
#include "ehaloha/markov.hpp"
#include "ehaloha/penalty.hpp"
#include "ehaloha/phase_type.hpp"
#include "ehaloha/scenario.hpp"
#include "ehaloha/strategy.hpp"

namespace ehaloha {

/// The (X, X_hat, B) chain obtained by averaging the other devices' profile
/// out of the full per-device chain, together with its steady state p and
/// the profile-averaged decoding probabilities used to build it.
///
/// When the estimate can never change (all pi * omega_bar terms vanish) the
/// chain splits into one closed class per estimate value; p is then the
/// mixture of per-class stationary laws weighted by the initial condition
/// x_hat = x with x drawn from the process stationary law.
struct ReducedChain {
    markov::StochasticMatrix P;
    Eigen::VectorXd p;
    std::vector<double> omega_bar;
    int battery_capacity;
    Eigen::VectorXd nu; ///< steady state of the underlying (X,B) chain

    int index(int x, int xhat, int b) const {
        return (2 * x + xhat) * (battery_capacity + 1) + b;
    }
};

ReducedChain build_reduced_chain(const Scenario& sc, const Strategy& st,
                                 const DecodingModel& model);

/// Entry distribution of a wrong- or correct-estimate period: probability
/// that the period starts in each transient state, plus the induced law of
/// the process state during the period.
///
/// Transient-state order: for the wrong-estimate chain
/// (0,1,0..E),(1,0,0..E); for the correct-estimate chain (0,0,0..E),(1,1,0..E).
struct EntryDistribution {
    Eigen::VectorXd tau;
    int battery_capacity;

    /// P[X_tilde = x]: mass of the entry states whose process state is x.
    double prob_process_state(int x) const;
};

struct WedResult {
    markov::PhaseType ph; ///< wrong-estimate duration W
    EntryDistribution entry;
};

struct CedResult {
    markov::PhaseType ph; ///< correct-estimate duration Y
    EntryDistribution entry;
};

/// Wrong-estimate duration as the absorption time of the chain restricted to
/// the mismatch states, entered according to the steady-state flow from the
/// matched states.
WedResult wed_phase_type(const ReducedChain& chain);

/// Correct-estimate duration, by the symmetric construction.
CedResult ced_phase_type(const ReducedChain& chain);

/// Gamma for the power penalty f_x(j) = j^alpha_x via Faulhaber's formula
/// over conditional WED moments. Exponents must be nonnegative integers.
double gamma_power(const WedResult& wed, const PenaltySpec& penalty);

/// Gamma for the linear penalty f_x(j) = alpha_x * j.
double gamma_linear(const WedResult& wed, double alpha0, double alpha1);

/// Renewal-reward ratio: average penalty = Gamma / (E[W] + E[Y]).
double average_penalty(double gamma, double mean_wed, double mean_ced);

/// Average AoII: Gamma = (E[W] + E[W^2]) / 2 over the cycle length.
double average_aoii(const WedResult& wed, double mean_ced);

/// Probability that a critical-state period (a sojourn of the process in
/// state 1 starting from a correctly estimated state 0) ends without any
/// successful update: P_ME = rho^T kappa.
double misdetection_probability(const ReducedChain& chain);

/// Everything the closed-form analysis produces for one configuration.
struct AnalysisReport {
    double mean_wed = 0.0;      ///< E[W]
    double second_wed = 0.0;    ///< E[W^2]
    double mean_ced = 0.0;      ///< E[Y]
    double gamma = 0.0;         ///< Gamma for the configured penalty
    double avg_penalty = 0.0;   ///< F_bar
    double avg_aoii = 0.0;      ///< Lambda_bar
    double mep = 0.0;           ///< P_ME
    double prob_wrong_state1 = 0.0; ///< P[X_tilde = 1]
};

AnalysisReport analyze(const Scenario& sc, const Strategy& st, const PenaltySpec& penalty,
                       const DecodingModel& model);

} // namespace ehaloha
