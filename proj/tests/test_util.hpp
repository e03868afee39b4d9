#pragma once

#include <Eigen/Dense>
#include <random>

#include "ehaloha/phase_type.hpp"
#include "ehaloha/scenario.hpp"
#include "ehaloha/strategy.hpp"

namespace ehaloha::testing {

inline Scenario small_scenario(int num_devices = 4, int battery_capacity = 2) {
    Scenario sc;
    sc.num_devices = num_devices;
    sc.battery_capacity = battery_capacity;
    sc.q01 = 0.08;
    sc.q10 = 0.12;
    sc.gamma0 = 0.3;
    sc.gamma1 = 0.25;
    sc.slot_channel_uses = 100;
    sc.rate_bits = 0.8;
    sc.noise_variance = 0.01;
    return sc;
}

/// The symmetric configuration used throughout the experiments
/// (U = 1000, E = 8, N = 100, R = 0.8, sigma^2 = 1e-2, gamma = 0.005).
inline Scenario symmetric_experiment(double uqbar = 1.0) {
    Scenario sc;
    sc.num_devices = 1000;
    sc.battery_capacity = 8;
    sc.gamma0 = sc.gamma1 = 0.005;
    sc.slot_channel_uses = 100;
    sc.rate_bits = 0.8;
    sc.noise_variance = 0.01;
    sc.q01 = sc.q10 = 1.0; // placeholder, fixed next
    return with_uqbar(sc, uqbar, 1.0);
}

/// The asymmetric configuration: q01/q10 = 0.01, gamma0 = 0.005, gamma1 = 0.05.
inline Scenario asymmetric_experiment(double uqbar) {
    Scenario sc;
    sc.num_devices = 1000;
    sc.battery_capacity = 8;
    sc.gamma0 = 0.005;
    sc.gamma1 = 0.05;
    sc.slot_channel_uses = 100;
    sc.rate_bits = 0.8;
    sc.noise_variance = 0.01;
    sc.q01 = sc.q10 = 1.0;
    return with_uqbar(sc, uqbar, 0.01);
}

inline Strategy random_strategy(StrategyClass cls, int battery_capacity, std::mt19937_64& rng) {
    FreeParameterLayout layout(cls, battery_capacity);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> values(layout.count());
    for (double& v : values) v = unif(rng);
    return layout.make_strategy(values);
}

inline Strategy constant_strategy(StrategyClass cls, int battery_capacity, double value) {
    FreeParameterLayout layout(cls, battery_capacity);
    std::vector<double> values(layout.count(), value);
    return layout.make_strategy(values);
}

/// Random terminating phase-type distribution with at most `max_states`
/// transient states; every row leaks at least `min_leak` to absorption so
/// the tail decays quickly enough for PMF-sum oracles.
inline markov::PhaseType random_phase_type(std::mt19937_64& rng, int max_states = 10,
                                           double min_leak = 0.05) {
    std::uniform_int_distribution<int> size_dist(1, max_states);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int n = size_dist(rng);
    Eigen::MatrixXd T(n, n);
    Eigen::VectorXd a(n), tau(n);
    for (int i = 0; i < n; ++i) {
        double leak = min_leak + (1.0 - min_leak) * unif(rng);
        Eigen::VectorXd row(n);
        double sum = 0.0;
        for (int j = 0; j < n; ++j) {
            row(j) = unif(rng);
            sum += row(j);
        }
        for (int j = 0; j < n; ++j) T(i, j) = (1.0 - leak) * row(j) / sum;
        a(i) = leak;
    }
    double tau_sum = 0.0;
    for (int i = 0; i < n; ++i) {
        tau(i) = unif(rng);
        tau_sum += tau(i);
    }
    tau /= tau_sum;
    return markov::PhaseType(std::move(tau), std::move(T), std::move(a));
}

/// Samples one absorption time of a phase-type distribution.
inline long sample_phase_type(const markov::PhaseType& ph, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int n = ph.num_states();
    double u = unif(rng);
    int s = 0;
    double acc = 0.0;
    for (s = 0; s < n; ++s) {
        acc += ph.tau(s);
        if (u < acc) break;
    }
    if (s == n) s = n - 1;
    long w = 0;
    while (true) {
        ++w;
        double v = unif(rng);
        double cum = 0.0;
        int next = -1;
        for (int j = 0; j < n; ++j) {
            cum += ph.T(s, j);
            if (v < cum) {
                next = j;
                break;
            }
        }
        if (next < 0) return w; // absorbed
        s = next;
    }
}

} // namespace ehaloha::testing
