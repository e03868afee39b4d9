#include "ehaloha/analysis.hpp"

#include <cmath>
#include <stdexcept>

#include "ehaloha/device_chain.hpp"
#include "ehaloha/faulhaber.hpp"
#include "ehaloha/validate.hpp"

namespace ehaloha {

namespace {

// Transient-state lists in the fixed tau orders.
std::vector<std::pair<int, int>> mismatch_pairs() { return {{0, 1}, {1, 0}}; }
std::vector<std::pair<int, int>> match_pairs() { return {{0, 0}, {1, 1}}; }

} // namespace

ReducedChain build_reduced_chain(const Scenario& sc, const Strategy& st,
                                 const DecodingModel& model) {
    require_valid(sc, st);
    const int E = sc.battery_capacity;
    ProcessBatteryChain pb = build_process_battery_chain(sc, st);
    std::vector<double> ob = omega_bar_all(sc, st, pb.nu, model);

    const int n = 4 * (E + 1);
    Eigen::MatrixXd P(n, n);
    auto idx = [&](int x, int h, int b) { return (2 * x + h) * (E + 1) + b; };
    for (int xp = 0; xp < 2; ++xp)
        for (int hp = 0; hp < 2; ++hp)
            for (int bp = 0; bp <= E; ++bp)
                for (int x = 0; x < 2; ++x)
                    for (int h = 0; h < 2; ++h)
                        for (int b = 0; b <= E; ++b)
                            P(idx(xp, hp, bp), idx(x, h, b)) =
                                estimate_chain_transition(xp, hp, bp, x, h, b, sc, st, ob[bp]);
    markov::StochasticMatrix sm(std::move(P));

    Eigen::VectorXd p;
    try {
        p = markov::stationary_distribution(sm);
    } catch (const markov::ReducibleChainError& err) {
        // The estimate is frozen (no pi * omega_bar path can flip it), so the
        // chain has one closed class per reachable estimate value. Mix the
        // per-class stationary laws according to the initial condition
        // x_hat = x, x ~ process stationary law.
        p = Eigen::VectorXd::Zero(sm.size());
        for (const auto& cls : err.recurrent_classes) {
            double weight = 0.0;
            for (int x = 0; x < 2; ++x) {
                int start = idx(x, x, E);
                for (int s : cls)
                    if (s == start) weight += sc.process_stationary(x);
            }
            if (weight > 0.0)
                p += weight * markov::stationary_distribution_on_class(sm, cls);
        }
        double total = p.sum();
        if (std::abs(total - 1.0) > 1e-9)
            throw std::runtime_error(
                "build_reduced_chain: frozen-estimate classes do not cover the initial states");
        p /= total;
    }
    return {std::move(sm), std::move(p), std::move(ob), E, std::move(pb.nu)};
}

double EntryDistribution::prob_process_state(int x) const {
    const int stride = battery_capacity + 1;
    double s = 0.0;
    for (int b = 0; b <= battery_capacity; ++b) s += tau(x * stride + b);
    return s;
}

namespace {

// Phase-type construction shared by the WED and CED chains: restrict the
// reduced chain to `transient` pairs, and weight entries by the steady-state
// flow from the complementary (delta-boundary) states.
struct PeriodChain {
    markov::PhaseType ph;
    EntryDistribution entry;
};

PeriodChain period_phase_type(const ReducedChain& chain,
                              const std::vector<std::pair<int, int>>& transient,
                              const std::vector<std::pair<int, int>>& others) {
    const int E = chain.battery_capacity;
    const int stride = E + 1;
    const int m = 2 * stride;

    std::vector<int> states;
    states.reserve(m);
    for (auto [x, h] : transient)
        for (int b = 0; b <= E; ++b) states.push_back(chain.index(x, h, b));

    Eigen::MatrixXd T(m, m);
    Eigen::VectorXd a(m);
    for (int i = 0; i < m; ++i) {
        double row = 0.0;
        for (int j = 0; j < m; ++j) {
            T(i, j) = chain.P(states[i], states[j]);
            row += T(i, j);
        }
        a(i) = 1.0 - row;
    }

    // Entry flow: steady-state mass of a boundary predecessor times its
    // one-step transition into the period, normalized over all entries.
    Eigen::VectorXd flow = Eigen::VectorXd::Zero(m);
    for (int i = 0; i < m; ++i)
        for (auto [xp, hp] : others)
            for (int bp = 0; bp <= E; ++bp)
                flow(i) += chain.p(chain.index(xp, hp, bp)) *
                           chain.P(chain.index(xp, hp, bp), states[i]);
    double total = flow.sum();
    if (total <= 0.0)
        throw std::runtime_error("period_phase_type: no entry flow into the period");
    flow /= total;

    markov::PhaseType ph(flow, std::move(T), std::move(a));
    return {std::move(ph), EntryDistribution{std::move(flow), E}};
}

} // namespace

WedResult wed_phase_type(const ReducedChain& chain) {
    PeriodChain pc = period_phase_type(chain, mismatch_pairs(), match_pairs());
    return {std::move(pc.ph), std::move(pc.entry)};
}

CedResult ced_phase_type(const ReducedChain& chain) {
    PeriodChain pc = period_phase_type(chain, match_pairs(), mismatch_pairs());
    return {std::move(pc.ph), std::move(pc.entry)};
}

double gamma_power(const WedResult& wed, const PenaltySpec& penalty) {
    require_valid(penalty);
    const int E = wed.entry.battery_capacity;
    const int stride = E + 1;
    const int max_alpha = std::max(penalty.alpha0, penalty.alpha1);
    std::vector<Rational> bern = bernoulli_numbers(max_alpha);

    double gamma = 0.0;
    for (int x = 0; x < 2; ++x) {
        double px = wed.entry.prob_process_state(x);
        if (px == 0.0) continue;
        const int alpha = penalty.alpha(x);

        // Conditional moments E[W_x^m]: tau restricted to the states entered
        // with process state x, renormalized, mixed over one-hot starts.
        std::vector<double> moments(alpha + 2, 0.0);
        for (int b = 0; b <= E; ++b) {
            int s = x * stride + b;
            double w = wed.entry.tau(s) / px;
            if (w == 0.0) continue;
            markov::PhaseType cond = markov::conditional_start(wed.ph, s);
            for (int m = 1; m <= alpha + 1; ++m) moments[m] += w * markov::raw_moment(cond, m);
        }

        double inner = 0.0;
        for (int k = 0; k <= alpha; ++k)
            inner += binomial(alpha + 1, k).to_double() * bern[k].to_double() *
                     moments[alpha - k + 1];
        gamma += px * inner / (alpha + 1);
    }
    return gamma;
}

double gamma_linear(const WedResult& wed, double alpha0, double alpha1) {
    if (alpha0 < 0.0 || alpha1 < 0.0)
        throw std::invalid_argument("gamma_linear: slopes must be nonnegative");
    const int E = wed.entry.battery_capacity;
    const int stride = E + 1;
    const int m = 2 * stride;
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(m, m) - wed.ph.T;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    // e_s^T (I-T)^{-2} 1 for all starts at once.
    Eigen::VectorXd v = lu.solve(lu.solve(Eigen::VectorXd::Ones(m)));
    double gamma = 0.0;
    for (int x = 0; x < 2; ++x) {
        double alpha = x == 0 ? alpha0 : alpha1;
        for (int b = 0; b <= E; ++b) {
            int s = x * stride + b;
            gamma += wed.entry.tau(s) * alpha * v(s);
        }
    }
    return gamma;
}

double average_penalty(double gamma, double mean_wed, double mean_ced) {
    if (mean_wed <= 0.0 || mean_ced <= 0.0)
        throw std::invalid_argument("average_penalty: period means must be positive");
    return gamma / (mean_wed + mean_ced);
}

double average_aoii(const WedResult& wed, double mean_ced) {
    double ew = markov::raw_moment(wed.ph, 1);
    double ew2 = markov::raw_moment(wed.ph, 2);
    return average_penalty(0.5 * (ew + ew2), ew, mean_ced);
}

double misdetection_probability(const ReducedChain& chain) {
    const int E = chain.battery_capacity;

    // Conditional battery law right before the 0 -> 1 transition.
    double mass_00 = 0.0;
    for (int b = 0; b <= E; ++b) mass_00 += chain.p(chain.index(0, 0, b));
    if (mass_00 <= 0.0)
        throw std::runtime_error(
            "misdetection_probability: no steady-state mass on correctly estimated state 0");

    // rho_b: probability that the critical transition goes unnotified and the
    // device lands at battery b. The reduced-chain row already carries the
    // q01 factor; conditioning on the transition divides it back out. q01 is
    // recovered exactly as the total 0 -> 1 mass of any (0,0,.) row.
    Eigen::VectorXd rho = Eigen::VectorXd::Zero(E + 1);
    double q01_factor = 0.0;
    for (int b = 0; b <= E; ++b)
        q01_factor += chain.P(chain.index(0, 0, E), chain.index(1, 0, b)) +
                      chain.P(chain.index(0, 0, E), chain.index(1, 1, b));
    if (q01_factor <= 0.0)
        throw std::runtime_error("misdetection_probability: process never enters state 1");
    for (int bp = 0; bp <= E; ++bp) {
        double w = chain.p(chain.index(0, 0, bp)) / mass_00;
        for (int b = 0; b <= E; ++b)
            rho(b) += w * chain.P(chain.index(0, 0, bp), chain.index(1, 0, b)) / q01_factor;
    }

    // M_ME: transient states (1,0,b); absorbing aggregates (0,0) and (1,1).
    Eigen::MatrixXd T(E + 1, E + 1);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(E + 1, 2);
    for (int bp = 0; bp <= E; ++bp) {
        for (int b = 0; b <= E; ++b) {
            T(bp, b) = chain.P(chain.index(1, 0, bp), chain.index(1, 0, b));
            A(bp, 0) += chain.P(chain.index(1, 0, bp), chain.index(0, 0, b)); // missed
            A(bp, 1) += chain.P(chain.index(1, 0, bp), chain.index(1, 1, b)); // noticed
        }
    }
    Eigen::MatrixXd kappa = markov::absorption_split(T, A);
    double p_me = rho.dot(kappa.col(0));
    return std::min(1.0, std::max(0.0, p_me));
}

AnalysisReport analyze(const Scenario& sc, const Strategy& st, const PenaltySpec& penalty,
                       const DecodingModel& model) {
    ReducedChain chain = build_reduced_chain(sc, st, model);
    WedResult wed = wed_phase_type(chain);
    CedResult ced = ced_phase_type(chain);

    AnalysisReport report;
    report.mean_wed = markov::raw_moment(wed.ph, 1);
    report.second_wed = markov::raw_moment(wed.ph, 2);
    report.mean_ced = markov::raw_moment(ced.ph, 1);
    report.gamma = gamma_power(wed, penalty);
    report.avg_penalty = average_penalty(report.gamma, report.mean_wed, report.mean_ced);
    report.avg_aoii = average_penalty(0.5 * (report.mean_wed + report.second_wed),
                                      report.mean_wed, report.mean_ced);
    report.mep = misdetection_probability(chain);
    report.prob_wrong_state1 = wed.entry.prob_process_state(1);
    return report;
}

} // namespace ehaloha
