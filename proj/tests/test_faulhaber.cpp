#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ehaloha/faulhaber.hpp"

using namespace ehaloha;

TEST_CASE("rational arithmetic stays reduced") {
    Rational a(2, 4);
    CHECK(a.num == 1);
    CHECK(a.den == 2);
    Rational b = a + Rational(1, 3);
    CHECK(b.num == 5);
    CHECK(b.den == 6);
    CHECK((Rational(3, 7) * Rational(7, 3)) == Rational(1));
    CHECK_THROWS(Rational(1, 0));
}

TEST_CASE("Bernoulli numbers use the B+ convention") {
    auto B = bernoulli_numbers(8);
    CHECK(B[0] == Rational(1));
    CHECK(B[1] == Rational(1, 2)); // the sign that makes Faulhaber sum from 1 to n
    CHECK(B[2] == Rational(1, 6));
    CHECK(B[3] == Rational(0));
    CHECK(B[4] == Rational(-1, 30));
    CHECK(B[5] == Rational(0));
    CHECK(B[6] == Rational(1, 42));
    CHECK(B[8] == Rational(-1, 30));
}

TEST_CASE("binomial coefficients") {
    CHECK(binomial(5, 2) == Rational(10));
    CHECK(binomial(7, 0) == Rational(1));
    CHECK(binomial(3, 5) == Rational(0));
}

TEST_CASE("Faulhaber matches direct power sums exactly") {
    // The alpha = 2, n = 3 case evaluates to 14 = 1 + 4 + 9.
    CHECK(faulhaber_sum(3, 2) == 14);
    for (int alpha = 0; alpha <= 6; ++alpha)
        for (std::int64_t n = 1; n <= 50; ++n)
            CHECK(faulhaber_sum(n, alpha) == power_sum_direct(n, alpha));
}
