#pragma once

#include <cstdint>
#include <vector>

namespace ehaloha {

/// Exact rational on 64-bit components, kept reduced with positive
/// denominator. Arithmetic throws on overflow; the intended range is the
/// small Bernoulli/Faulhaber computations below.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n);             // NOLINT(google-explicit-constructor)
    Rational(std::int64_t n, std::int64_t d);

    Rational operator+(const Rational& o) const;
    Rational operator-(const Rational& o) const;
    Rational operator*(const Rational& o) const;
    Rational operator/(const Rational& o) const;
    bool operator==(const Rational& o) const { return num == o.num && den == o.den; }

    bool is_integer() const { return den == 1; }
    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// Bernoulli numbers B_0 .. B_n in the B+ convention (B_1 = +1/2), generated
/// exactly by the Akiyama-Tanigawa recurrence. With this convention
/// Faulhaber's formula reproduces sum_{j=1}^{n} j^alpha.
std::vector<Rational> bernoulli_numbers(int n);

/// Binomial coefficient as an exact rational (arguments small).
Rational binomial(int n, int k);

/// sum_{j=1}^{n} j^alpha via Faulhaber's formula,
/// (1/(alpha+1)) sum_k C(alpha+1, k) B_k n^{alpha-k+1}, evaluated exactly.
/// The result is always an integer; throws if the rational does not reduce
/// to one.
std::int64_t faulhaber_sum(std::int64_t n, int alpha);

/// Direct integer evaluation of sum_{j=1}^{n} j^alpha (test oracle and
/// simulator-side exact accumulator).
std::int64_t power_sum_direct(std::int64_t n, int alpha);

} // namespace ehaloha
