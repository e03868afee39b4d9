#include "ehaloha/faulhaber.hpp"

#include <numeric>
#include <stdexcept>

namespace ehaloha {

namespace {

std::int64_t checked(__int128 v, const char* what) {
    if (v > INT64_MAX || v < INT64_MIN)
        throw std::overflow_error(std::string("Rational overflow in ") + what);
    return static_cast<std::int64_t>(v);
}

} // namespace

Rational::Rational(std::int64_t n) : num(n), den(1) {}

Rational::Rational(std::int64_t n, std::int64_t d) {
    if (d == 0) throw std::invalid_argument("Rational: zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    std::int64_t g = std::gcd(n < 0 ? -n : n, d);
    if (g == 0) g = 1;
    num = n / g;
    den = d / g;
}

Rational Rational::operator+(const Rational& o) const {
    __int128 n = static_cast<__int128>(num) * o.den + static_cast<__int128>(o.num) * den;
    __int128 d = static_cast<__int128>(den) * o.den;
    // Reduce in 128-bit before narrowing.
    auto gcd128 = [](__int128 a, __int128 b) {
        if (a < 0) a = -a;
        while (b != 0) {
            __int128 t = a % b;
            a = b;
            b = t;
        }
        return a;
    };
    __int128 g = gcd128(n, d);
    if (g == 0) g = 1;
    n /= g;
    d /= g;
    return Rational(checked(n, "add"), checked(d, "add"));
}

Rational Rational::operator-(const Rational& o) const {
    return *this + Rational(-o.num, o.den);
}

Rational Rational::operator*(const Rational& o) const {
    Rational a(num, o.den); // cross-reduce first
    Rational b(o.num, den);
    __int128 n = static_cast<__int128>(a.num) * b.num;
    __int128 d = static_cast<__int128>(a.den) * b.den;
    return Rational(checked(n, "mul"), checked(d, "mul"));
}

Rational Rational::operator/(const Rational& o) const {
    if (o.num == 0) throw std::invalid_argument("Rational: division by zero");
    return *this * Rational(o.den, o.num);
}

std::vector<Rational> bernoulli_numbers(int n) {
    if (n < 0) throw std::invalid_argument("bernoulli_numbers: n must be >= 0");
    std::vector<Rational> bernoulli;
    bernoulli.reserve(static_cast<size_t>(n) + 1);
    std::vector<Rational> row;
    for (int m = 0; m <= n; ++m) {
        row.emplace_back(1, m + 1);
        for (int j = m; j >= 1; --j)
            row[j - 1] = Rational(j) * (row[j - 1] - row[j]);
        bernoulli.push_back(row[0]);
    }
    return bernoulli;
}

Rational binomial(int n, int k) {
    if (k < 0 || k > n) return Rational(0);
    Rational r(1);
    for (int i = 1; i <= k; ++i) r = r * Rational(n - k + i, i);
    return r;
}

std::int64_t faulhaber_sum(std::int64_t n, int alpha) {
    if (n < 0 || alpha < 0) throw std::invalid_argument("faulhaber_sum: n, alpha must be >= 0");
    std::vector<Rational> B = bernoulli_numbers(alpha);
    Rational total(0);
    for (int k = 0; k <= alpha; ++k) {
        Rational pw(1);
        for (int e = 0; e < alpha - k + 1; ++e) pw = pw * Rational(n);
        total = total + binomial(alpha + 1, k) * B[k] * pw;
    }
    total = total / Rational(alpha + 1);
    if (!total.is_integer())
        throw std::logic_error("faulhaber_sum: non-integer result");
    return total.num;
}

std::int64_t power_sum_direct(std::int64_t n, int alpha) {
    std::int64_t sum = 0;
    for (std::int64_t j = 1; j <= n; ++j) {
        std::int64_t p = 1;
        for (int e = 0; e < alpha; ++e) p = checked(static_cast<__int128>(p) * j, "power_sum");
        sum = checked(static_cast<__int128>(sum) + p, "power_sum");
    }
    return sum;
}

} // namespace ehaloha
