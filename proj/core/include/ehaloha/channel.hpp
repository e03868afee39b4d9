#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "ehaloha/scenario.hpp"
#include "ehaloha/strategy.hpp"

namespace ehaloha {

/// Single-user decoding-failure probability of a packet sent with b energy
/// units over the slot channel. Implementations must be stateless and
/// non-increasing in b.
class DecodingModel {
  public:
    virtual ~DecodingModel() = default;
    virtual double epsilon(int b) const = 0;
};

/// Normal approximation for N uses of a real-valued AWGN channel at rate R
/// and noise variance sigma^2:
///
///   eps(b) = Q( (N C(s) - N R + (1/2) log2 N) / sqrt(N V(s)) ),
///   s = b / (N sigma^2),  C(s) = (1/2) log2(1+s),
///   V(s) = s(s+2) / (2 (1+s)^2) * (log2 e)^2.
class NormalApproxDecoding final : public DecodingModel {
  public:
    NormalApproxDecoding(int slot_channel_uses, double rate_bits, double noise_variance);
    explicit NormalApproxDecoding(const Scenario& sc)
        : NormalApproxDecoding(sc.slot_channel_uses, sc.rate_bits, sc.noise_variance) {}

    double epsilon(int b) const override;

  private:
    int n_;
    double rate_;
    double noise_;
};

/// Per-category transmit probability t_(x,b) = sum_j q_{xj} pi_b^{(xj)} of a
/// device whose previous-slot process-battery state is (x,b). Indexed by
/// x*(E+1)+b; t_(x,0) = 0.
std::vector<double> transmit_profile(const Scenario& sc, const Strategy& st);

/// Probability that an update sent with b energy units is decoded, given the
/// other devices' process-battery profile ell (counts summing to U-1):
/// the slot must be a singleton and the single-user decode must succeed.
double omega_given_profile(int b, std::span<const long> profile, const Scenario& sc,
                           const Strategy& st, const DecodingModel& model);

/// Profile-averaged decoding probability
/// omega_bar_b = (1 - eps(b)) * ( sum_c nu_c (1 - t_c) )^{U-1},
/// the expectation of omega_given_profile under the stationary multinomial
/// profile with category law nu.
double omega_bar(int b, const Scenario& sc, const Strategy& st, const Eigen::VectorXd& nu,
                 const DecodingModel& model);

/// omega_bar for b in [0:E]; entry 0 is 0 (an empty battery never transmits).
std::vector<double> omega_bar_all(const Scenario& sc, const Strategy& st,
                                  const Eigen::VectorXd& nu, const DecodingModel& model);

} // namespace ehaloha
