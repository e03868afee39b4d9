#include "ehaloha/device_chain.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include "ehaloha/validate.hpp"

namespace ehaloha {

double phi_transmit(int b, double gamma) {
    if (b == 0) return 1.0 - gamma;
    if (b == 1) return gamma;
    return 0.0;
}

double phi_no_transmit(int b_prev, int b, double gamma, int battery_capacity) {
    if (b_prev == battery_capacity) return b == b_prev ? 1.0 : 0.0;
    if (b == b_prev) return 1.0 - gamma;
    if (b == b_prev + 1) return gamma;
    return 0.0;
}

double process_battery_transition(int x_prev, int b_prev, int x, int b, const Scenario& sc,
                                  const Strategy& st) {
    const double pi = st.pi(x_prev, x, b_prev);
    const double gamma = sc.gamma(x);
    return sc.q(x_prev, x) * (pi * phi_transmit(b, gamma) +
                              (1.0 - pi) * phi_no_transmit(b_prev, b, gamma, sc.battery_capacity));
}

ProcessBatteryChain build_process_battery_chain(const Scenario& sc, const Strategy& st) {
    require_valid(sc, st);
    const int E = sc.battery_capacity;
    const int n = 2 * (E + 1);
    Eigen::MatrixXd P(n, n);
    for (int xp = 0; xp < 2; ++xp)
        for (int bp = 0; bp <= E; ++bp)
            for (int x = 0; x < 2; ++x)
                for (int b = 0; b <= E; ++b)
                    P(pb_index(xp, bp, E), pb_index(x, b, E)) =
                        process_battery_transition(xp, bp, x, b, sc, st);
    markov::StochasticMatrix sm(std::move(P));
    Eigen::VectorXd nu = markov::stationary_distribution(sm);
    return {std::move(sm), std::move(nu)};
}

double estimate_chain_transition(int x_prev, int xhat_prev, int b_prev, int x, int xhat, int b,
                                 const Scenario& sc, const Strategy& st, double omega_b_prev) {
    const double q = sc.q(x_prev, x);
    const double pi = st.pi(x_prev, x, b_prev);
    const double gamma = sc.gamma(x);
    const double pt = phi_transmit(b, gamma);
    const double pn = phi_no_transmit(b_prev, b, gamma, sc.battery_capacity);
    const bool was_correct = xhat_prev == x_prev;

    if (x == x_prev) {
        if (was_correct) {
            // A correct estimate of an unchanged state stays correct; it can
            // never turn wrong without a (state-changing) missed update.
            return xhat == x_prev ? q * (pi * pt + (1.0 - pi) * pn) : 0.0;
        }
        if (xhat == x_prev) // corrected by a delivered update
            return q * pi * omega_b_prev * pt;
        return q * (pi * (1.0 - omega_b_prev) * pt + (1.0 - pi) * pn); // stays wrong
    }
    // Process changed state.
    if (was_correct) {
        if (xhat == x_prev) // update missed or not sent: estimate now stale
            return q * (pi * (1.0 - omega_b_prev) * pt + (1.0 - pi) * pn);
        return q * pi * omega_b_prev * pt; // new state delivered
    }
    if (xhat == x_prev) // stale estimate cannot jump to the pre-change state
        return 0.0;
    // The old (wrong) estimate equals the new state: correct again whether or
    // not the update goes through.
    return q * (pi * pt + (1.0 - pi) * pn);
}

std::vector<std::vector<long>> enumerate_profiles(int num_other_devices, int battery_capacity) {
    const int cats = 2 * (battery_capacity + 1);
    std::vector<std::vector<long>> out;
    std::vector<long> cur(cats, 0);
    std::function<void(int, long)> rec = [&](int c, long remaining) {
        if (c == cats - 1) {
            cur[c] = remaining;
            out.push_back(cur);
            return;
        }
        for (long v = 0; v <= remaining; ++v) {
            cur[c] = v;
            rec(c + 1, remaining - v);
        }
    };
    rec(0, num_other_devices);
    return out;
}

long profile_rank(std::span<const long> counts) {
    auto compositions = [](long n, long k) {
        // C(n+k-1, k-1) compositions of n into k nonnegative parts
        double r = 1.0;
        for (long i = 1; i < k; ++i) r = r * (n + i) / i;
        return static_cast<long>(std::llround(r));
    };
    long rank = 0;
    long remaining = 0;
    for (long c : counts) remaining += c;
    const long k = static_cast<long>(counts.size());
    for (long i = 0; i < k - 1; ++i) {
        for (long v = 0; v < counts[i]; ++v) rank += compositions(remaining - v, k - 1 - i);
        remaining -= counts[i];
    }
    return rank;
}

namespace {

void check_oracle_guard(const Scenario& sc) {
    if (sc.num_devices - 1 > 6 || sc.battery_capacity > 2)
        throw std::invalid_argument(
            "profile/full-chain oracle is guarded to U-1 <= 6 and E <= 2 (got U-1 = " +
            std::to_string(sc.num_devices - 1) + ", E = " + std::to_string(sc.battery_capacity) +
            ")");
}

// Category-level transition matrix of one other device.
Eigen::MatrixXd category_kernel(const Scenario& sc, const Strategy& st) {
    const int E = sc.battery_capacity;
    const int cats = 2 * (E + 1);
    Eigen::MatrixXd P(cats, cats);
    for (int xp = 0; xp < 2; ++xp)
        for (int bp = 0; bp <= E; ++bp)
            for (int x = 0; x < 2; ++x)
                for (int b = 0; b <= E; ++b)
                    P(pb_index(xp, bp, E), pb_index(x, b, E)) =
                        process_battery_transition(xp, bp, x, b, sc, st);
    return P;
}

double multinomial_pmf(long n, const Eigen::MatrixXd& P, int row, std::span<const long> counts) {
    double coeff = 1.0;
    long used = 0;
    double prob = 1.0;
    for (size_t k = 0; k < counts.size(); ++k) {
        for (long i = 1; i <= counts[k]; ++i) {
            ++used;
            coeff *= static_cast<double>(used) / static_cast<double>(i);
        }
        if (counts[k] > 0) {
            double p = P(row, static_cast<int>(k));
            if (p == 0.0) return 0.0;
            prob *= std::pow(p, static_cast<double>(counts[k]));
        }
    }
    (void)n;
    return coeff * prob;
}

} // namespace

double profile_transition(std::span<const long> from, std::span<const long> to,
                          const Scenario& sc, const Strategy& st) {
    check_oracle_guard(sc);
    const int cats = 2 * (sc.battery_capacity + 1);
    if (static_cast<int>(from.size()) != cats || static_cast<int>(to.size()) != cats)
        throw std::invalid_argument("profile_transition: profile size mismatch");
    long sf = 0, st_ = 0;
    for (int c = 0; c < cats; ++c) {
        sf += from[c];
        st_ += to[c];
    }
    if (sf != sc.num_devices - 1 || st_ != sc.num_devices - 1)
        throw std::invalid_argument("profile_transition: profiles must sum to U-1");

    const Eigen::MatrixXd P = category_kernel(sc, st);
    std::vector<long> remaining(to.begin(), to.end());

    // Sum over flow matrices u: each source category j scatters its from[j]
    // devices into destinations as an independent multinomial; destination
    // margins must match `to`. The composition buffer is per row; only the
    // remaining destination capacities are shared down the recursion.
    std::function<double(int)> over_rows = [&](int j) -> double {
        if (j == cats) {
            for (int c = 0; c < cats; ++c)
                if (remaining[c] != 0) return 0.0;
            return 1.0;
        }
        double total = 0.0;
        std::vector<long> u(cats, 0);
        std::function<void(int, long)> over_row = [&](int k, long left) {
            if (k == cats - 1) {
                if (left > remaining[k]) return;
                u[k] = left;
                remaining[k] -= left;
                double pmf = multinomial_pmf(from[j], P, j, u);
                if (pmf > 0.0) total += pmf * over_rows(j + 1);
                remaining[k] += left;
                return;
            }
            for (long v = 0; v <= std::min(left, remaining[k]); ++v) {
                u[k] = v;
                remaining[k] -= v;
                over_row(k + 1, left - v);
                remaining[k] += v;
            }
        };
        over_row(0, from[j]);
        return total;
    };
    return over_rows(0);
}

ProfileChain build_profile_chain(const Scenario& sc, const Strategy& st) {
    check_oracle_guard(sc);
    require_valid(sc, st);
    auto profiles = enumerate_profiles(sc.num_devices - 1, sc.battery_capacity);
    const int n = static_cast<int>(profiles.size());
    Eigen::MatrixXd P(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            P(i, j) = profile_transition(profiles[i], profiles[j], sc, st);
    return {std::move(profiles), markov::StochasticMatrix(std::move(P))};
}

FullChainG build_full_chain(const Scenario& sc, const Strategy& st, const DecodingModel& model) {
    ProfileChain profile = build_profile_chain(sc, st);
    const int E = sc.battery_capacity;
    const int nl = static_cast<int>(profile.profiles.size());
    const int n = 4 * (E + 1) * nl;

    // omega_{b', ell'} for every previous battery level >= 1 and profile.
    std::vector<std::vector<double>> omega(nl, std::vector<double>(E + 1, 0.0));
    for (int li = 0; li < nl; ++li)
        for (int b = 1; b <= E; ++b)
            omega[li][b] = omega_given_profile(b, profile.profiles[li], sc, st, model);

    auto idx = [&](int x, int h, int b, int l) {
        return ((2 * x + h) * (E + 1) + b) * nl + l;
    };
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
    for (int xp = 0; xp < 2; ++xp)
        for (int hp = 0; hp < 2; ++hp)
            for (int bp = 0; bp <= E; ++bp)
                for (int lp = 0; lp < nl; ++lp) {
                    const int row = idx(xp, hp, bp, lp);
                    for (int x = 0; x < 2; ++x)
                        for (int h = 0; h < 2; ++h)
                            for (int b = 0; b <= E; ++b) {
                                double cond = estimate_chain_transition(xp, hp, bp, x, h, b, sc,
                                                                        st, omega[lp][bp]);
                                if (cond == 0.0) continue;
                                for (int l = 0; l < nl; ++l)
                                    P(row, idx(x, h, b, l)) = cond * profile.P(lp, l);
                            }
                }
    return {std::move(profile.profiles), markov::StochasticMatrix(std::move(P)), E};
}

} // namespace ehaloha
