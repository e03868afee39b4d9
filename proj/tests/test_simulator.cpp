#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "ehaloha/analysis.hpp"
#include "ehaloha/device_chain.hpp"
#include "ehaloha/io.hpp"
#include "ehaloha/simulator.hpp"
#include "test_util.hpp"

using namespace ehaloha;

TEST_CASE("identical seeds replicate bit-identically") {
    Scenario sc = testing::small_scenario(6, 2);
    Strategy st = testing::constant_strategy(StrategyClass::Hybrid, 2, 0.4);
    NormalApproxDecoding model(sc);
    SimConfig config;
    config.num_slots = 50'000;
    config.warmup_slots = 1'000;
    config.seed = 12345;
    SimStats a = run_simulation(sc, st, model, config);
    SimStats b = run_simulation(sc, st, model, config);
    CHECK(to_json(a) == to_json(b));
    CHECK(a.aoii_slot_sum == b.aoii_slot_sum);
    CHECK(a.wed_samples.size() == b.wed_samples.size());

    config.seed = 54321;
    SimStats c = run_simulation(sc, st, model, config);
    CHECK(to_json(a) != to_json(c));
}

TEST_CASE("trace-level protocol invariants") {
    Scenario sc = testing::small_scenario(3, 2);
    Strategy st = testing::constant_strategy(StrategyClass::Hybrid, 2, 0.5);
    NormalApproxDecoding model(sc);
    SimConfig config;
    config.num_slots = 5'000;
    config.warmup_slots = 100;
    config.seed = 7;

    std::ostringstream trace;
    run_simulation(sc, st, model, config, &trace);

    std::istringstream lines(trace.str());
    std::string line;
    std::int64_t current_slot = -1;
    int decodes_this_slot = 0;
    std::vector<std::int64_t> prev_lambda(3, 0);
    std::vector<int> prev_b(3, 2);
    long rows = 0;
    while (std::getline(lines, line)) {
        std::istringstream ls(line);
        std::int64_t slot;
        int device, x, x_hat, b, transmitted, decoded;
        std::int64_t lambda;
        char comma;
        ls >> slot >> comma >> device >> comma >> x >> comma >> x_hat >> comma >> b >> comma >>
            transmitted >> comma >> decoded >> comma >> lambda;
        ++rows;

        if (slot != current_slot) {
            if (current_slot >= 0) CHECK(decodes_this_slot <= 1);
            current_slot = slot;
            decodes_this_slot = 0;
        }
        decodes_this_slot += decoded;

        CHECK(b >= 0);
        CHECK(b <= 2);
        if (transmitted) CHECK(b <= 1); // all energy spent, then at most one harvest
        CHECK((lambda == 0) == (x == x_hat));
        if (lambda > 0) CHECK(lambda == prev_lambda[device] + 1);
        if (!transmitted) {
            CHECK(b >= prev_b[device]); // battery never drops without a transmission
            CHECK(b <= std::min(prev_b[device] + 1, 2));
        }
        prev_lambda[device] = lambda;
        prev_b[device] = b;
    }
    CHECK(rows == 3 * 5'000);
}

TEST_CASE("silent devices follow the two-state renewal closed form") {
    Scenario sc = testing::small_scenario(200, 1);
    sc.q01 = 0.02;
    sc.q10 = 0.05;
    Strategy silent(StrategyClass::Hybrid, 1);
    NormalApproxDecoding model(sc);

    SimConfig config;
    config.num_slots = 120'000;
    config.warmup_slots = 5'000;
    config.seed = 11;
    config.record_period_samples = false;
    SimStats stats = run_simulation(sc, silent, model, config);

    // Never-updated chain: per estimate class c, W ~ Geom(q_{(1-c) -> c}),
    // Y ~ Geom(q_{c -> (1-c)}), mixed by the initial process law.
    auto geo_mean = [](double q) { return 1.0 / q; };
    auto geo_second = [](double q) { return (2.0 - q) / (q * q); };
    double expected = 0.0;
    for (int c = 0; c < 2; ++c) {
        double q_w = c == 0 ? sc.q10 : sc.q01;
        double q_y = c == 0 ? sc.q01 : sc.q10;
        double gamma_c = 0.5 * (geo_mean(q_w) + geo_second(q_w));
        expected += sc.process_stationary(c) * gamma_c / (geo_mean(q_w) + geo_mean(q_y));
    }

    // Devices do not interact when nobody transmits: per-device means are
    // i.i.d., so the standard error across devices applies.
    double mean = 0.0;
    for (double v : stats.per_device_aoii) mean += v;
    mean /= stats.per_device_aoii.size();
    double var = 0.0;
    for (double v : stats.per_device_aoii) var += (v - mean) * (v - mean);
    var /= (stats.per_device_aoii.size() - 1);
    double se = std::sqrt(var / stats.per_device_aoii.size());
    CHECK(std::abs(mean - expected) < 3.0 * se);

    // And every critical period is missed.
    MepEstimate mep = empirical_mep(stats);
    CHECK(mep.point == 1.0);
    CHECK(stats.critical_periods > 1000);
}

TEST_CASE("tracked-device subsets restrict the accounting") {
    Scenario sc = testing::small_scenario(5, 1);
    Strategy st = testing::constant_strategy(StrategyClass::Random, 1, 0.3);
    NormalApproxDecoding model(sc);
    SimConfig config;
    config.num_slots = 20'000;
    config.warmup_slots = 500;
    config.seed = 31;
    config.tracked_devices = {2};
    SimStats stats = run_simulation(sc, st, model, config);
    CHECK(stats.devices_tracked == 1);
    CHECK(stats.per_device_aoii.size() == 1);
    CHECK(stats.device_slots == stats.slots);
    CHECK_THROWS_AS(
        [&] {
            SimConfig bad = config;
            bad.tracked_devices = {7};
            return run_simulation(sc, st, model, bad);
        }(),
        std::invalid_argument);
}

TEST_CASE("empirical MEP requires critical periods") {
    SimStats empty;
    CHECK_THROWS_AS(empirical_mep(empty), std::runtime_error);
}

TEST_CASE("label-swap symmetry within confidence intervals") {
    Scenario sc = testing::small_scenario(10, 1);
    sc.q01 = sc.q10 = 0.04;
    sc.gamma0 = sc.gamma1 = 0.3;
    Strategy st = testing::constant_strategy(StrategyClass::Random, 1, 0.3);
    NormalApproxDecoding model(sc);
    SimConfig config;
    config.num_slots = 400'000;
    config.warmup_slots = 10'000;
    config.seed = 13;

    SimStats stats = run_simulation(sc, st, model, config);
    Scenario swapped = sc; // symmetric parameters: relabeling is a no-op here
    std::swap(swapped.q01, swapped.q10);
    std::swap(swapped.gamma0, swapped.gamma1);
    SimConfig config2 = config;
    config2.seed = 14;
    SimStats stats2 = run_simulation(swapped, st, model, config2);

    MepEstimate a = empirical_mep(stats);
    MepEstimate b = empirical_mep(stats2);
    CHECK(a.wilson_low <= b.wilson_high);
    CHECK(b.wilson_low <= a.wilson_high);
}

TEST_CASE("replication pooling is associative bookkeeping") {
    Scenario sc = testing::small_scenario(4, 1);
    Strategy st = testing::constant_strategy(StrategyClass::Random, 1, 0.4);
    NormalApproxDecoding model(sc);
    SimConfig config;
    config.num_slots = 30'000;
    config.warmup_slots = 1'000;

    std::vector<SimStats> parts;
    for (int rep = 0; rep < 4; ++rep) {
        SimConfig rc = config;
        rc.seed = replication_seed(777, rep);
        parts.push_back(run_simulation(sc, st, model, rc));
    }
    SimStats pooled = merge_stats(parts);
    SimStats two_step = merge_stats({merge_stats({parts[0], parts[1]}),
                                     merge_stats({parts[2], parts[3]})});
    CHECK(pooled.aoii_slot_sum == two_step.aoii_slot_sum);
    CHECK(pooled.device_slots == two_step.device_slots);
    CHECK(pooled.wed.count == two_step.wed.count);
    CHECK(pooled.critical_periods == two_step.critical_periods);
    CHECK(pooled.slots == parts[0].slots * 4);
}

TEST_CASE("occupancy of (x,b) converges to nu at tiny scale") {
    Scenario sc = testing::small_scenario(2, 1);
    Strategy st = testing::constant_strategy(StrategyClass::Hybrid, 1, 0.25);
    NormalApproxDecoding model(sc);

    SimConfig config;
    config.num_slots = 2'000'000;
    config.warmup_slots = 20'000;
    config.seed = 17;
    config.record_period_samples = false;
    config.track_occupancy = true;
    SimStats stats = run_simulation(sc, st, model, config);

    Eigen::VectorXd nu = build_process_battery_chain(sc, st).nu;
    const int E = 1;
    const long nl = static_cast<long>(enumerate_profiles(1, E).size());

    // chi-square on subsampled (x,b) occupancy of device 0. Subsampling every
    // 50 slots decorrelates the draws at these mixing rates.
    const int stride_slots = 50;
    std::vector<double> marginal(2 * (E + 1), 0.0);
    for (int x = 0; x < 2; ++x)
        for (int h = 0; h < 2; ++h)
            for (int b = 0; b <= E; ++b)
                for (long l = 0; l < nl; ++l)
                    marginal[pb_index(x, b, E)] +=
                        stats.occupancy_counts[((2 * x + h) * (E + 1) + b) * nl + l];

    double total = 0.0;
    for (double c : marginal) total += c;
    double chi2 = 0.0;
    double n_eff = total / stride_slots;
    for (int c = 0; c < 2 * (E + 1); ++c) {
        double expected = n_eff * nu(c);
        double observed = marginal[c] / stride_slots;
        chi2 += (observed - expected) * (observed - expected) / expected;
    }
    // 99.9% quantile of chi-square with 3 degrees of freedom.
    CHECK(chi2 < 16.266);
}
