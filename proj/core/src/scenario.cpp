#include "ehaloha/scenario.hpp"

namespace ehaloha {

double mean_change_probability(const Scenario& sc) {
    return 2.0 * sc.q01 * sc.q10 / (sc.q01 + sc.q10);
}

Scenario with_uqbar(Scenario base, double uqbar, double q_ratio) {
    if (base.num_devices <= 0)
        throw std::invalid_argument("with_uqbar: scenario needs num_devices > 0");
    if (uqbar <= 0.0 || q_ratio <= 0.0)
        throw std::invalid_argument("with_uqbar: uqbar and q_ratio must be > 0");
    // q_bar = 2*q01*q10/(q01+q10) with q01 = r*q10 gives q10 = q_bar*(r+1)/(2r).
    double qbar = uqbar / base.num_devices;
    base.q10 = qbar * (q_ratio + 1.0) / (2.0 * q_ratio);
    base.q01 = q_ratio * base.q10;
    if (base.q01 > 1.0 || base.q10 > 1.0)
        throw std::invalid_argument("with_uqbar: requested rate not reachable with probabilities <= 1");
    return base;
}

} // namespace ehaloha
