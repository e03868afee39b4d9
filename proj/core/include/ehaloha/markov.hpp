#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace ehaloha::markov {

/// Row-stochastic transition matrix ("from row-state to column-state").
/// Entries are checked to lie in [0,1] and rows to sum to 1 within `tol`.
class StochasticMatrix {
  public:
    explicit StochasticMatrix(Eigen::MatrixXd P, double tol = 1e-12);

    int size() const { return static_cast<int>(P_.rows()); }
    double operator()(int i, int j) const { return P_(i, j); }
    const Eigen::MatrixXd& matrix() const { return P_; }

  private:
    Eigen::MatrixXd P_;
};

/// Strongly connected components of the support graph, split into recurrent
/// classes (no edge leaving the class) and transient states.
struct ChainStructure {
    std::vector<std::vector<int>> recurrent_classes;
    std::vector<int> transient_states;
};

ChainStructure chain_structure(const Eigen::MatrixXd& P);

/// Thrown when a chain has more than one recurrent class and therefore no
/// unique stationary distribution. Carries the offending classes.
class ReducibleChainError : public std::runtime_error {
  public:
    ReducibleChainError(std::string what, std::vector<std::vector<int>> classes)
        : std::runtime_error(std::move(what)), recurrent_classes(std::move(classes)) {}
    std::vector<std::vector<int>> recurrent_classes;
};

/// Unique stationary distribution pi with pi^T P = pi^T, sum 1, entries >= 0.
/// Solved by replacing one balance equation with the normalization row.
/// Throws ReducibleChainError if the chain has several recurrent classes.
Eigen::VectorXd stationary_distribution(const StochasticMatrix& P);

/// Stationary distribution of the restriction of P to one recurrent class,
/// expressed on the full state space (zero off the class).
Eigen::VectorXd stationary_distribution_on_class(const StochasticMatrix& P,
                                                 const std::vector<int>& cls);

/// (I - T)^{-1} for a substochastic T with spectral radius < 1, by dense LU.
/// Throws std::runtime_error("chain does not terminate") when I - T is
/// numerically singular.
Eigen::MatrixXd fundamental_matrix(const Eigen::MatrixXd& T);

/// Absorption probabilities (I - T)^{-1} A for a chain with transient kernel
/// T and transient-to-absorbing block A (one column per absorbing state).
/// Rows of the result sum to 1 when rows of [T | A] are stochastic.
Eigen::MatrixXd absorption_split(const Eigen::MatrixXd& T, const Eigen::MatrixXd& A);

} // namespace ehaloha::markov
