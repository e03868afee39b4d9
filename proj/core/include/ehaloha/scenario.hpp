#pragma once

#include <stdexcept>

namespace ehaloha {

/// System configuration: a population of energy-harvesting devices, each
/// tracking a two-state Markov process and reporting over slotted ALOHA.
///
/// All probabilities are per-slot. The noise variance is stored in linear
/// scale; dB conversion is a front-end concern.
struct Scenario {
    int num_devices = 0;       ///< U, number of devices sharing the channel
    int battery_capacity = 0;  ///< E, battery capacity in energy units
    double q01 = 0.0;          ///< P[state 0 -> 1] per slot
    double q10 = 0.0;          ///< P[state 1 -> 0] per slot
    double gamma0 = 0.0;       ///< energy harvesting rate while in state 0
    double gamma1 = 0.0;       ///< energy harvesting rate while in state 1
    int slot_channel_uses = 0; ///< N, real channel uses per slot
    double rate_bits = 0.0;    ///< R, bits per channel use
    double noise_variance = 0.0; ///< sigma^2, linear scale

    /// Process transition probability q_{from,to}; diagonal entries derived.
    double q(int from, int to) const {
        if (from == 0) return to == 1 ? q01 : 1.0 - q01;
        return to == 0 ? q10 : 1.0 - q10;
    }

    /// Harvesting rate for the given process state.
    double gamma(int x) const { return x == 0 ? gamma0 : gamma1; }

    /// Stationary probability of the process being in state x.
    double process_stationary(int x) const {
        double p1 = q01 / (q01 + q10);
        return x == 1 ? p1 : 1.0 - p1;
    }
};

/// Average per-slot probability that a process changes state,
/// q_bar = 2*q01*q10 / (q01 + q10).
double mean_change_probability(const Scenario& sc);

/// Returns a copy of `base` with q01, q10 chosen so that
/// num_devices * q_bar == uqbar and q01/q10 == q_ratio.
Scenario with_uqbar(Scenario base, double uqbar, double q_ratio);

} // namespace ehaloha
