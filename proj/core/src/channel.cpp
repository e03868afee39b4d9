#include "ehaloha/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ehaloha {

namespace {

double q_function(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2_v<double>); }

} // namespace

NormalApproxDecoding::NormalApproxDecoding(int slot_channel_uses, double rate_bits,
                                           double noise_variance)
    : n_(slot_channel_uses), rate_(rate_bits), noise_(noise_variance) {
    if (n_ < 1 || rate_ <= 0.0 || noise_ <= 0.0)
        throw std::invalid_argument("NormalApproxDecoding: need N >= 1, R > 0, sigma^2 > 0");
}

double NormalApproxDecoding::epsilon(int b) const {
    if (b < 1) throw std::invalid_argument("epsilon: no transmission possible with b = 0");
    const double log2e = std::numbers::log2e_v<double>;
    double s = static_cast<double>(b) / (n_ * noise_);
    double capacity = 0.5 * std::log2(1.0 + s);
    double dispersion = s * (s + 2.0) / (2.0 * (1.0 + s) * (1.0 + s)) * log2e * log2e;
    double arg = (n_ * capacity - n_ * rate_ + 0.5 * std::log2(static_cast<double>(n_))) /
                 std::sqrt(n_ * dispersion);
    double eps = q_function(arg);
    return std::min(1.0, std::max(0.0, eps));
}

std::vector<double> transmit_profile(const Scenario& sc, const Strategy& st) {
    const int E = sc.battery_capacity;
    std::vector<double> t(2 * (E + 1), 0.0);
    for (int x = 0; x < 2; ++x)
        for (int b = 0; b <= E; ++b)
            t[x * (E + 1) + b] = sc.q(x, 0) * st.pi(x, 0, b) + sc.q(x, 1) * st.pi(x, 1, b);
    return t;
}

double omega_given_profile(int b, std::span<const long> profile, const Scenario& sc,
                           const Strategy& st, const DecodingModel& model) {
    const int E = sc.battery_capacity;
    if (static_cast<int>(profile.size()) != 2 * (E + 1))
        throw std::invalid_argument("omega_given_profile: profile has wrong size");
    long total = 0;
    for (long c : profile) total += c;
    if (total != sc.num_devices - 1)
        throw std::invalid_argument("omega_given_profile: profile must sum to U-1");
    std::vector<double> t = transmit_profile(sc, st);
    double silent = 1.0;
    for (size_t c = 0; c < t.size(); ++c)
        silent *= std::pow(1.0 - t[c], static_cast<double>(profile[c]));
    return (1.0 - model.epsilon(b)) * silent;
}

double omega_bar(int b, const Scenario& sc, const Strategy& st, const Eigen::VectorXd& nu,
                 const DecodingModel& model) {
    const int E = sc.battery_capacity;
    if (nu.size() != 2 * (E + 1))
        throw std::invalid_argument("omega_bar: nu has wrong size");
    std::vector<double> t = transmit_profile(sc, st);
    // E[prod_c (1-t_c)^{L_c}] factorizes over the U-1 i.i.d. categorical
    // draws that make up the multinomial profile.
    double per_device_silent = 0.0;
    for (int c = 0; c < nu.size(); ++c) per_device_silent += nu(c) * (1.0 - t[c]);
    return (1.0 - model.epsilon(b)) *
           std::pow(per_device_silent, static_cast<double>(sc.num_devices - 1));
}

std::vector<double> omega_bar_all(const Scenario& sc, const Strategy& st,
                                  const Eigen::VectorXd& nu, const DecodingModel& model) {
    std::vector<double> out(sc.battery_capacity + 1, 0.0);
    for (int b = 1; b <= sc.battery_capacity; ++b) out[b] = omega_bar(b, sc, st, nu, model);
    return out;
}

} // namespace ehaloha
