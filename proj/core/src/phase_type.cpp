#include "ehaloha/phase_type.hpp"

#include <stdexcept>
#include <string>

#include "ehaloha/markov.hpp"

namespace ehaloha::markov {

PhaseType::PhaseType(Eigen::VectorXd tau_, Eigen::MatrixXd T_, Eigen::VectorXd a_, double tol)
    : tau(std::move(tau_)), T(std::move(T_)), a(std::move(a_)) {
    const auto n = tau.size();
    if (T.rows() != n || T.cols() != n || a.size() != n)
        throw std::invalid_argument("PhaseType: dimension mismatch");
    double tau_sum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (tau(i) < -tol)
            throw std::invalid_argument("PhaseType: tau has negative entry at " + std::to_string(i));
        tau_sum += tau(i);
        double row = a(i);
        if (a(i) < -tol)
            throw std::invalid_argument("PhaseType: absorption vector negative at " + std::to_string(i));
        for (Eigen::Index j = 0; j < n; ++j) {
            if (T(i, j) < -tol)
                throw std::invalid_argument("PhaseType: T has negative entry");
            row += T(i, j);
        }
        if (std::abs(row - 1.0) > tol)
            throw std::invalid_argument("PhaseType: row " + std::to_string(i) + " of [T | a] sums to " +
                                        std::to_string(row));
    }
    if (std::abs(tau_sum - 1.0) > tol)
        throw std::invalid_argument("PhaseType: tau sums to " + std::to_string(tau_sum));
    // Termination (spectral radius < 1) is certified by the solve itself.
    fundamental_matrix(T);
}

double pmf(const PhaseType& ph, long w) {
    if (w < 1) throw std::invalid_argument("pmf: support starts at w = 1");
    Eigen::RowVectorXd v = ph.tau.transpose();
    for (long k = 1; k < w; ++k) v = v * ph.T;
    return v * ph.a;
}

std::vector<double> pmf_prefix(const PhaseType& ph, long w_max) {
    std::vector<double> out;
    out.reserve(static_cast<size_t>(w_max));
    Eigen::RowVectorXd v = ph.tau.transpose();
    for (long w = 1; w <= w_max; ++w) {
        out.push_back(v * ph.a);
        v = v * ph.T;
    }
    return out;
}

double tail_mass(const PhaseType& ph, long w) {
    Eigen::RowVectorXd v = ph.tau.transpose();
    for (long k = 0; k < w; ++k) v = v * ph.T;
    return v.sum();
}

double factorial_moment(const PhaseType& ph, int k) {
    if (k < 1) throw std::invalid_argument("factorial_moment: order must be >= 1");
    const auto n = ph.num_states();
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n) - ph.T;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    Eigen::VectorXd v = Eigen::VectorXd::Ones(n);
    for (int i = 0; i < k; ++i) {
        Eigen::VectorXd rhs = v;
        v = lu.solve(rhs);
        v += lu.solve(rhs - M * v); // refinement for slow-terminating chains
    }
    for (int i = 0; i < k - 1; ++i) v = ph.T * v;
    double kfact = 1.0;
    for (int i = 2; i <= k; ++i) kfact *= i;
    return kfact * ph.tau.dot(v);
}

std::vector<double> stirling_second_row(int m) {
    // S(m, k) by the triangle recurrence S(m,k) = k S(m-1,k) + S(m-1,k-1).
    std::vector<double> row(static_cast<size_t>(m) + 1, 0.0);
    row[0] = 1.0;
    for (int i = 1; i <= m; ++i) {
        for (int k = i; k >= 1; --k) row[k] = k * row[k] + row[k - 1];
        row[0] = 0.0;
    }
    return row;
}

double raw_moment(const PhaseType& ph, int m) {
    if (m < 1) throw std::invalid_argument("raw_moment: order must be >= 1");
    if (m > 30) throw std::invalid_argument("raw_moment: order too large for a stable conversion");
    std::vector<double> stirling = stirling_second_row(m);
    double sum = 0.0;
    for (int k = 1; k <= m; ++k) sum += stirling[k] * factorial_moment(ph, k);
    return sum;
}

PhaseType conditional_start(const PhaseType& ph, int s) {
    if (s < 0 || s >= ph.num_states())
        throw std::invalid_argument("conditional_start: invalid transient-state index " +
                                    std::to_string(s));
    Eigen::VectorXd tau = Eigen::VectorXd::Zero(ph.num_states());
    tau(s) = 1.0;
    return PhaseType(std::move(tau), ph.T, ph.a);
}

} // namespace ehaloha::markov
