#pragma once

#include <Eigen/Dense>
#include <vector>

namespace ehaloha::markov {

/// Discrete phase-type distribution on {1, 2, ...}: absorption time of a
/// terminating chain with initial vector tau over the transient states,
/// transient kernel T and absorption vector a (rows of [T | a] stochastic).
struct PhaseType {
    Eigen::VectorXd tau;
    Eigen::MatrixXd T;
    Eigen::VectorXd a;

    PhaseType(Eigen::VectorXd tau_, Eigen::MatrixXd T_, Eigen::VectorXd a_, double tol = 1e-12);

    int num_states() const { return static_cast<int>(tau.size()); }
};

/// P[W = w] = tau^T T^{w-1} a, for w >= 1.
double pmf(const PhaseType& ph, long w);

/// First `w_max` PMF values (index k holds P[W = k+1]).
std::vector<double> pmf_prefix(const PhaseType& ph, long w_max);

/// P[W > w] = tau^T T^w 1.
double tail_mass(const PhaseType& ph, long w);

/// k-th factorial moment E[W (W-1) ... (W-k+1)] = k! tau^T T^{k-1} (I-T)^{-k} 1.
double factorial_moment(const PhaseType& ph, int k);

/// Raw moment E[W^m], assembled from factorial moments via Stirling numbers
/// of the second kind. m = 1 and m = 2 coincide with the direct
/// fundamental-matrix expressions E[W] = tau^T (I-T)^{-1} 1 and
/// E[W^2] = 2 tau^T (I-T)^{-2} 1 - E[W].
double raw_moment(const PhaseType& ph, int m);

/// Same distribution conditioned on starting in transient state s
/// (tau replaced by the one-hot vector at s).
PhaseType conditional_start(const PhaseType& ph, int s);

/// Stirling numbers of the second kind S(m, k) for k in [0:m].
std::vector<double> stirling_second_row(int m);

} // namespace ehaloha::markov
