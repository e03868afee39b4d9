#pragma once

#include <cstdint>

namespace ehaloha {

/// Power penalty f_x(j) = j^alpha_x with nonnegative integer exponents.
/// Integer exponents are required by the closed-form average-penalty
/// evaluation; alpha0 = alpha1 = 1 recovers the plain AoII.
struct PenaltySpec {
    int alpha0 = 1;
    int alpha1 = 1;

    int alpha(int x) const { return x == 0 ? alpha0 : alpha1; }

    double value(int x, std::int64_t lambda) const {
        double r = 1.0;
        double base = static_cast<double>(lambda);
        for (int k = alpha(x); k > 0; --k) r *= base;
        return lambda == 0 ? 0.0 : r;
    }
};

/// Per-device metric record: process state, receiver estimate, and the age
/// of incorrect information they induce.
struct AoiiState {
    int x = 0;               ///< current process state
    int x_hat = 0;           ///< receiver estimate
    std::int64_t lambda = 0; ///< AoII; 0 iff x == x_hat

    int delta() const { return x == x_hat ? 0 : 1; }
};

} // namespace ehaloha
