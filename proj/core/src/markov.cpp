#include "ehaloha/markov.hpp"

#include <algorithm>
#include <sstream>

namespace ehaloha::markov {

StochasticMatrix::StochasticMatrix(Eigen::MatrixXd P, double tol) : P_(std::move(P)) {
    if (P_.rows() != P_.cols() || P_.rows() == 0)
        throw std::invalid_argument("StochasticMatrix: matrix must be square and nonempty");
    for (Eigen::Index i = 0; i < P_.rows(); ++i) {
        double row_sum = 0.0;
        for (Eigen::Index j = 0; j < P_.cols(); ++j) {
            double v = P_(i, j);
            if (!(v >= -tol && v <= 1.0 + tol))
                throw std::invalid_argument("StochasticMatrix: entry (" + std::to_string(i) + "," +
                                            std::to_string(j) + ") = " + std::to_string(v) +
                                            " outside [0,1]");
            row_sum += v;
        }
        if (std::abs(row_sum - 1.0) > tol)
            throw std::invalid_argument("StochasticMatrix: row " + std::to_string(i) +
                                        " sums to " + std::to_string(row_sum));
    }
}

namespace {

// Iterative Tarjan SCC on the support graph of P.
struct Tarjan {
    const Eigen::MatrixXd& P;
    int n;
    std::vector<int> index, lowlink, comp;
    std::vector<bool> on_stack;
    std::vector<int> stack;
    int next_index = 0, num_comps = 0;

    explicit Tarjan(const Eigen::MatrixXd& P_)
        : P(P_), n(static_cast<int>(P_.rows())), index(n, -1), lowlink(n, 0), comp(n, -1),
          on_stack(n, false) {}

    void run() {
        for (int v = 0; v < n; ++v)
            if (index[v] < 0) visit(v);
    }

    void visit(int root) {
        // Explicit stack of (vertex, next_child) frames.
        std::vector<std::pair<int, int>> frames;
        frames.push_back({root, 0});
        index[root] = lowlink[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            auto& [v, child] = frames.back();
            if (child < n) {
                int w = child++;
                if (P(v, w) <= 0.0) continue;
                if (index[w] < 0) {
                    index[w] = lowlink[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    lowlink[v] = std::min(lowlink[v], index[w]);
                }
            } else {
                if (lowlink[v] == index[v]) {
                    while (true) {
                        int w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        comp[w] = num_comps;
                        if (w == v) break;
                    }
                    ++num_comps;
                }
                frames.pop_back();
                if (!frames.empty()) {
                    int parent = frames.back().first;
                    lowlink[parent] = std::min(lowlink[parent], lowlink[v]);
                }
            }
        }
    }
};

std::string class_list_string(const std::vector<std::vector<int>>& classes) {
    std::ostringstream os;
    for (size_t c = 0; c < classes.size(); ++c) {
        os << (c ? ", " : "") << "{";
        for (size_t k = 0; k < classes[c].size(); ++k)
            os << (k ? "," : "") << classes[c][k];
        os << "}";
    }
    return os.str();
}

} // namespace

ChainStructure chain_structure(const Eigen::MatrixXd& P) {
    Tarjan t(P);
    t.run();
    const int n = t.n;
    std::vector<bool> closed(t.num_comps, true);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (P(i, j) > 0.0 && t.comp[i] != t.comp[j]) closed[t.comp[i]] = false;
    ChainStructure out;
    std::vector<std::vector<int>> by_comp(t.num_comps);
    for (int i = 0; i < n; ++i) by_comp[t.comp[i]].push_back(i);
    for (int c = 0; c < t.num_comps; ++c) {
        if (closed[c])
            out.recurrent_classes.push_back(std::move(by_comp[c]));
        else
            out.transient_states.insert(out.transient_states.end(), by_comp[c].begin(),
                                        by_comp[c].end());
    }
    std::sort(out.recurrent_classes.begin(), out.recurrent_classes.end());
    std::sort(out.transient_states.begin(), out.transient_states.end());
    return out;
}

Eigen::VectorXd stationary_distribution_on_class(const StochasticMatrix& P,
                                                 const std::vector<int>& cls) {
    const int m = static_cast<int>(cls.size());
    Eigen::MatrixXd sub(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) sub(i, j) = P(cls[i], cls[j]);
    // Balance equations pi^T (P - I) = 0 with the last equation replaced by
    // the normalization sum(pi) = 1.
    Eigen::MatrixXd A = sub.transpose() - Eigen::MatrixXd::Identity(m, m);
    A.row(m - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    rhs(m - 1) = 1.0;
    Eigen::VectorXd pi_sub = A.partialPivLu().solve(rhs);
    for (int i = 0; i < m; ++i) {
        if (pi_sub(i) < 0.0) {
            if (pi_sub(i) < -1e-10)
                throw std::runtime_error("stationary_distribution: negative mass on state " +
                                         std::to_string(cls[i]));
            pi_sub(i) = 0.0;
        }
    }
    pi_sub /= pi_sub.sum();

    Eigen::VectorXd pi = Eigen::VectorXd::Zero(P.size());
    for (int i = 0; i < m; ++i) pi(cls[i]) = pi_sub(i);

    double residual = (pi.transpose() * P.matrix() - pi.transpose()).cwiseAbs().maxCoeff();
    if (residual > 1e-10)
        throw std::runtime_error("stationary_distribution: residual " + std::to_string(residual) +
                                 " exceeds 1e-10");
    return pi;
}

Eigen::VectorXd stationary_distribution(const StochasticMatrix& P) {
    ChainStructure cs = chain_structure(P.matrix());
    if (cs.recurrent_classes.size() != 1)
        throw ReducibleChainError("stationary_distribution: chain has " +
                                      std::to_string(cs.recurrent_classes.size()) +
                                      " recurrent classes: " +
                                      class_list_string(cs.recurrent_classes),
                                  cs.recurrent_classes);
    return stationary_distribution_on_class(P, cs.recurrent_classes.front());
}

Eigen::MatrixXd fundamental_matrix(const Eigen::MatrixXd& T) {
    if (T.rows() != T.cols())
        throw std::invalid_argument("fundamental_matrix: T must be square");
    const int n = static_cast<int>(T.rows());
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd M = I - T;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    Eigen::MatrixXd N = lu.solve(I);
    if (!N.allFinite()) throw std::runtime_error("chain does not terminate");
    // One step of iterative refinement; slow-terminating chains produce very
    // large entries and need it to reach the residual target.
    N += lu.solve(I - M * N);
    double residual = (M * N - I).cwiseAbs().maxCoeff();
    double scale = std::max(1.0, N.cwiseAbs().maxCoeff());
    if (!N.allFinite() || residual > 1e-10 * scale)
        throw std::runtime_error("chain does not terminate");
    return N;
}

Eigen::MatrixXd absorption_split(const Eigen::MatrixXd& T, const Eigen::MatrixXd& A) {
    if (A.rows() != T.rows())
        throw std::invalid_argument("absorption_split: row mismatch between T and A");
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(T.rows(), T.cols()) - T;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    Eigen::MatrixXd K = lu.solve(A);
    if (!K.allFinite()) throw std::runtime_error("chain does not terminate");
    K += lu.solve(A - M * K);
    // Row sums of (I-T)^{-1} bound the attainable absolute accuracy.
    double scale = std::max(1.0, fundamental_matrix(T).rowwise().sum().maxCoeff());
    double worst = (K.rowwise().sum() - Eigen::VectorXd::Ones(K.rows())).cwiseAbs().maxCoeff();
    if (worst > 1e-10 * scale)
        throw std::runtime_error("absorption_split: absorption rows sum to 1 +/- " +
                                 std::to_string(worst));
    return K;
}

} // namespace ehaloha::markov
