#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ehaloha/channel.hpp"
#include "ehaloha/device_chain.hpp"
#include "test_util.hpp"

using namespace ehaloha;

namespace {

struct PerfectDecoding final : DecodingModel {
    double epsilon(int) const override { return 0.0; }
};

} // namespace

TEST_CASE("normal-approximation decoding error, frozen reference values") {
    // High-precision (60-digit) evaluations of the Q-function expression at
    // N = 100, R = 0.8, sigma^2 = 1e-2.
    NormalApproxDecoding model(100, 0.8, 0.01);
    CHECK(model.epsilon(1) == doctest::Approx(0.9987348876894420).epsilon(1e-12));
    CHECK(model.epsilon(2) == doctest::Approx(0.3946522902818020).epsilon(1e-12));
    CHECK(model.epsilon(3) == doctest::Approx(9.109754967641066e-3).epsilon(1e-12));
    CHECK(model.epsilon(8) == doctest::Approx(3.507296169529094e-16).epsilon(1e-10));
    CHECK_THROWS_AS(model.epsilon(0), std::invalid_argument);
}

TEST_CASE("decoding error is monotone and vanishes for rates below capacity") {
    NormalApproxDecoding model(100, 0.8, 0.01);
    for (int b = 1; b < 8; ++b) CHECK(model.epsilon(b + 1) <= model.epsilon(b));
    // Above capacity the Q-argument is positive, so eps < 1/2.
    for (int b = 1; b <= 8; ++b) {
        double s = b / (100 * 0.01);
        double capacity = 0.5 * std::log2(1.0 + s);
        if (capacity > 0.8) CHECK(model.epsilon(b) < 0.5);
    }
    // Below capacity at fixed SNR the error vanishes as the blocklength
    // grows (s = 1 held fixed by scaling the noise with N).
    double prev = 1.0;
    for (int n : {25, 100, 400, 1600}) {
        NormalApproxDecoding low_rate(n, 0.1, 1.0 / n);
        double eps = low_rate.epsilon(1);
        CHECK(eps <= prev);
        prev = eps;
    }
    CHECK(prev < 1e-12);
}

TEST_CASE("omega given a profile") {
    Scenario sc = testing::small_scenario(2, 2);
    Strategy st = testing::constant_strategy(StrategyClass::Random, 2, 0.3);
    PerfectDecoding perfect;

    SUBCASE("silent neighbors leave only the single-user decode") {
        NormalApproxDecoding model(sc);
        std::vector<long> all_empty = {1, 0, 0, 0, 0, 0}; // the other device at (0,0)
        CHECK(omega_given_profile(2, all_empty, sc, st, model) ==
              doctest::Approx(1.0 - model.epsilon(2)).epsilon(1e-12));
    }
    SUBCASE("one interfering device") {
        // t = 0.3 for every category with b > 0 under the random strategy.
        std::vector<long> profile = {0, 1, 0, 0, 0, 0};
        CHECK(omega_given_profile(2, profile, sc, st, perfect) ==
              doctest::Approx(0.7).epsilon(1e-12));
    }
    SUBCASE("profile must sum to U-1") {
        std::vector<long> wrong = {1, 1, 0, 0, 0, 0};
        CHECK_THROWS_AS(omega_given_profile(2, wrong, sc, st, perfect), std::invalid_argument);
    }
}

TEST_CASE("omega against Monte Carlo over interferer draws") {
    Scenario sc = testing::small_scenario(4, 1);
    std::mt19937_64 rng(41);
    Strategy st = testing::random_strategy(StrategyClass::Hybrid, 1, rng);
    PerfectDecoding perfect;
    std::vector<long> profile = {1, 1, 0, 1}; // mixed categories over 3 devices
    std::vector<double> t = transmit_profile(sc, st);

    const int kSamples = 400'000;
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    int silent = 0;
    for (int s = 0; s < kSamples; ++s) {
        bool any = false;
        for (size_t c = 0; c < t.size(); ++c)
            for (long d = 0; d < profile[c]; ++d)
                if (unif(rng) < t[c]) any = true;
        if (!any) ++silent;
    }
    double omega = omega_given_profile(1, profile, sc, st, perfect);
    double phat = static_cast<double>(silent) / kSamples;
    double sigma = std::sqrt(omega * (1 - omega) / kSamples);
    CHECK(std::abs(phat - omega) < 3.0 * sigma + 1e-12);
}

TEST_CASE("omega_bar basic shapes") {
    PerfectDecoding perfect;
    SUBCASE("no interference at all") {
        Scenario sc = testing::small_scenario(5, 2);
        Strategy silent(StrategyClass::Hybrid, 2); // all-zero pi
        NormalApproxDecoding model(sc);
        ProcessBatteryChain pb = build_process_battery_chain(sc, silent);
        for (int b = 1; b <= 2; ++b)
            CHECK(omega_bar(b, sc, silent, pb.nu, model) ==
                  doctest::Approx(1.0 - model.epsilon(b)).epsilon(1e-12));
    }
    SUBCASE("single occupied category reduces to the profile formula") {
        Scenario sc = testing::small_scenario(2, 1);
        Strategy st = testing::constant_strategy(StrategyClass::Random, 1, 0.3);
        Eigen::VectorXd nu = Eigen::VectorXd::Zero(4);
        nu(1) = 1.0; // the other device always at (0,1)
        CHECK(omega_bar(1, sc, st, nu, perfect) == doctest::Approx(0.7).epsilon(1e-12));
    }
    SUBCASE("U = 1 has no collisions") {
        Scenario sc = testing::small_scenario(1, 2);
        Strategy st = testing::constant_strategy(StrategyClass::Random, 2, 0.9);
        NormalApproxDecoding model(sc);
        ProcessBatteryChain pb = build_process_battery_chain(sc, st);
        CHECK(omega_bar(2, sc, st, pb.nu, model) ==
              doctest::Approx(1.0 - model.epsilon(2)).epsilon(1e-15));
    }
}

TEST_CASE("omega_bar equals the Monte Carlo profile average") {
    // Multinomial profile draws from nu, omega averaged across them.
    Scenario sc = testing::symmetric_experiment(1.0);
    sc.num_devices = 50; // keep the exact per-draw product cheap
    Strategy st = testing::constant_strategy(StrategyClass::Hybrid, 8, 0.35);
    NormalApproxDecoding model(sc);
    ProcessBatteryChain pb = build_process_battery_chain(sc, st);
    std::vector<double> t = transmit_profile(sc, st);

    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const int kDraws = 100'000;
    const int b = 4;
    double sum = 0.0, sumsq = 0.0;
    for (int s = 0; s < kDraws; ++s) {
        double silent = 1.0;
        for (int d = 0; d < sc.num_devices - 1; ++d) {
            double u = unif(rng);
            double acc = 0.0;
            int cat = 0;
            for (int c = 0; c < pb.nu.size(); ++c) {
                acc += pb.nu(c);
                if (u < acc) {
                    cat = c;
                    break;
                }
            }
            silent *= 1.0 - t[cat];
        }
        double w = (1.0 - model.epsilon(b)) * silent;
        sum += w;
        sumsq += w * w;
    }
    double mc = sum / kDraws;
    double se = std::sqrt((sumsq / kDraws - mc * mc) / kDraws);
    double ob = omega_bar(b, sc, st, pb.nu, model);
    CHECK(std::abs(mc - ob) < 3.0 * se + 1e-12);
}

TEST_CASE("omega_bar is monotone in interference") {
    Scenario sc = testing::small_scenario(6, 2);
    PerfectDecoding perfect;
    Eigen::VectorXd nu(6);
    nu << 0.1, 0.2, 0.2, 0.1, 0.2, 0.2;
    double prev = 1.0;
    for (double level : {0.0, 0.2, 0.4, 0.6, 0.8}) {
        Strategy st = testing::constant_strategy(StrategyClass::Random, 2, level);
        double ob = omega_bar(2, sc, st, nu, perfect);
        CHECK(ob <= prev + 1e-15);
        prev = ob;
    }
}
