#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "ehaloha/channel.hpp"
#include "ehaloha/penalty.hpp"
#include "ehaloha/scenario.hpp"
#include "ehaloha/strategy.hpp"

namespace ehaloha {

struct SimConfig {
    std::int64_t num_slots = 1'000'000;
    std::int64_t warmup_slots = 10'000;
    std::uint64_t seed = 1;
    PenaltySpec penalty{};
    /// Devices whose metrics are accumulated; empty means all of them.
    std::vector<int> tracked_devices;
    bool record_period_samples = true;
    /// Tiny-scale occupancy histogram of device 0's (x, xhat, b, profile),
    /// with per-batch counts for batch-means standard errors.
    bool track_occupancy = false;
    int occupancy_batches = 100;
};

/// One completed wrong- or correct-estimate period.
struct PeriodSample {
    std::int32_t length = 0;
    std::int8_t process_state = 0; ///< X_tilde for wrong periods, -1 for correct ones
    std::int8_t entry_battery = 0;
};

struct RunningMoments {
    std::int64_t count = 0;
    double sum = 0.0;
    double sum_sq = 0.0;

    void add(double v) {
        ++count;
        sum += v;
        sum_sq += v * v;
    }
    double mean() const { return count ? sum / count : 0.0; }
    double variance() const {
        if (count < 2) return 0.0;
        double m = mean();
        return (sum_sq - count * m * m) / (count - 1);
    }
    double stderr_mean() const;
    void merge(const RunningMoments& o) {
        count += o.count;
        sum += o.sum;
        sum_sq += o.sum_sq;
    }
};

struct SimStats {
    std::uint64_t seed = 0;
    std::int64_t slots = 0; ///< accumulated slots (after warmup)
    int devices_tracked = 0;
    std::int64_t device_slots = 0;

    double aoii_slot_sum = 0.0;
    double penalty_slot_sum = 0.0;

    RunningMoments wed_by_state[2];
    RunningMoments wed;
    RunningMoments ced;
    std::vector<PeriodSample> wed_samples;
    std::vector<PeriodSample> ced_samples;

    std::int64_t critical_periods = 0;
    std::int64_t critical_missed = 0;

    std::vector<double> per_device_aoii;
    std::vector<double> per_device_penalty;

    std::vector<std::int64_t> occupancy_counts;
    std::vector<std::vector<std::int64_t>> occupancy_batches;
    std::int64_t occupancy_slots = 0;

    double avg_aoii() const { return device_slots ? aoii_slot_sum / device_slots : 0.0; }
    double avg_penalty() const { return device_slots ? penalty_slot_sum / device_slots : 0.0; }
};

/// Slot-level Monte Carlo of the full protocol. Deterministic given the
/// seed; one sequential pass over slots, devices in fixed order.
SimStats run_simulation(const Scenario& sc, const Strategy& st, const DecodingModel& model,
                        const SimConfig& config, std::ostream* trace = nullptr);

/// Pool independent replications (weighted by accumulated slots).
SimStats merge_stats(const std::vector<SimStats>& parts);

/// Seed for replication `rep` derived from a master seed (splitmix64 step).
std::uint64_t replication_seed(std::uint64_t master_seed, int rep);

struct MepEstimate {
    double point = 0.0;
    double wilson_low = 0.0;
    double wilson_high = 0.0;
    std::int64_t misses = 0;
    std::int64_t periods = 0;
};

/// Empirical misdetection probability with a Wilson score interval.
/// Throws if no critical period was observed.
MepEstimate empirical_mep(const SimStats& stats, double z = 1.96);

} // namespace ehaloha
