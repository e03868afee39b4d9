#include "ehaloha/simulator.hpp"

#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>

#include "ehaloha/device_chain.hpp"
#include "ehaloha/validate.hpp"

namespace ehaloha {

double RunningMoments::stderr_mean() const {
    return count ? std::sqrt(variance() / count) : 0.0;
}

std::uint64_t replication_seed(std::uint64_t master_seed, int rep) {
    // splitmix64 of (master + rep * golden gamma); documented in the manual.
    std::uint64_t z = master_seed + static_cast<std::uint64_t>(rep + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {

struct DeviceRuntime {
    int x = 0;
    int x_hat = 0;
    int b = 0;
    std::int64_t lambda = 0;
    int prev_delta = 0;
    // Open wrong/correct period bookkeeping.
    std::int64_t period_start = -1;
    std::int32_t period_length = 0;
    std::int8_t period_state = 0;
    std::int8_t period_entry_battery = 0;
    // Open critical period (process in state 1, entered from (0,0)).
    bool critical_open = false;
    bool critical_noticed = false;
    std::int64_t critical_start = -1;
};

} // namespace

SimStats run_simulation(const Scenario& sc, const Strategy& st, const DecodingModel& model,
                        const SimConfig& config, std::ostream* trace) {
    require_valid(sc, st);
    require_valid(config.penalty);
    if (config.warmup_slots < 0 || config.warmup_slots >= config.num_slots)
        throw std::invalid_argument("SimConfig: need 0 <= warmup_slots < num_slots");

    const int U = sc.num_devices;
    const int E = sc.battery_capacity;

    std::vector<char> tracked(U, 0);
    if (config.tracked_devices.empty()) {
        std::fill(tracked.begin(), tracked.end(), 1);
    } else {
        for (int d : config.tracked_devices) {
            if (d < 0 || d >= U)
                throw std::invalid_argument("SimConfig: tracked device out of range");
            tracked[d] = 1;
        }
    }

    std::vector<double> eps(E + 1, 1.0);
    for (int b = 1; b <= E; ++b) eps[b] = model.epsilon(b);

    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    SimStats stats;
    stats.seed = config.seed;
    stats.devices_tracked = 0;
    for (char t : tracked) stats.devices_tracked += t;

    std::vector<DeviceRuntime> dev(U);
    const double p1 = sc.process_stationary(1);
    for (auto& d : dev) {
        d.x = unif(rng) < p1 ? 1 : 0;
        d.x_hat = d.x;
        d.b = E;
    }

    std::vector<double> dev_aoii(U, 0.0), dev_penalty(U, 0.0);
    std::vector<std::int8_t> transmitted(U, 0);

    // Occupancy tracking (tiny scale only).
    int occ_states = 0;
    long occ_profiles = 0;
    std::vector<long> occ_counts_vec;
    std::int64_t occ_batch_len = 0;
    std::vector<std::int64_t> occ_batch;
    if (config.track_occupancy) {
        if (U - 1 > 6 || E > 2)
            throw std::invalid_argument("track_occupancy is limited to U-1 <= 6, E <= 2");
        occ_profiles = static_cast<long>(enumerate_profiles(U - 1, E).size());
        occ_states = 4 * (E + 1) * static_cast<int>(occ_profiles);
        stats.occupancy_counts.assign(occ_states, 0);
        occ_batch.assign(occ_states, 0);
        occ_batch_len = std::max<std::int64_t>(
            1, (config.num_slots - config.warmup_slots) / std::max(1, config.occupancy_batches));
        occ_counts_vec.assign(2 * (E + 1), 0);
    }

    const std::int64_t warmup = config.warmup_slots;

    for (std::int64_t slot = 0; slot < config.num_slots; ++slot) {
        const bool live = slot >= warmup;

        int tx_count = 0;
        int tx_dev = -1;
        int tx_energy = 0;

        for (int d = 0; d < U; ++d) {
            DeviceRuntime& r = dev[d];
            const int x_prev = r.x;
            const int x_new = unif(rng) < sc.q(x_prev, 1 - x_prev) ? 1 - x_prev : x_prev;

            bool tx = false;
            if (r.b > 0) {
                double pi = st.pi(x_prev, x_new, r.b);
                if (pi > 0.0) tx = unif(rng) < pi;
            }
            transmitted[d] = tx;

            // Critical-period bookkeeping keys on the transition itself.
            if (x_prev == 0 && x_new == 1) {
                if (r.x_hat == 0 && live) {
                    r.critical_open = true;
                    r.critical_noticed = false;
                    r.critical_start = slot;
                } else {
                    r.critical_open = false;
                }
            } else if (x_prev == 1 && x_new == 0 && r.critical_open) {
                ++stats.critical_periods;
                if (!r.critical_noticed) ++stats.critical_missed;
                r.critical_open = false;
            }

            const double gamma = sc.gamma(x_new);
            if (tx) {
                ++tx_count;
                tx_dev = d;
                tx_energy = r.b;
                r.b = unif(rng) < gamma ? 1 : 0;
            } else if (r.b < E) {
                if (unif(rng) < gamma) ++r.b;
            }
            r.x = x_new;
        }

        bool decoded = false;
        if (tx_count == 1) {
            decoded = unif(rng) < 1.0 - eps[tx_energy];
            if (decoded) {
                DeviceRuntime& r = dev[tx_dev];
                r.x_hat = r.x;
                if (r.critical_open && r.x == 1) r.critical_noticed = true;
            }
        }

        for (int d = 0; d < U; ++d) {
            DeviceRuntime& r = dev[d];
            const int delta = r.x == r.x_hat ? 0 : 1;
            r.lambda = delta ? r.lambda + 1 : 0;

            if (tracked[d]) {
                if (delta != r.prev_delta) {
                    // A period just closed and a new one opened.
                    if (live && config.record_period_samples && r.period_start >= warmup &&
                        r.period_length > 0) {
                        PeriodSample sample{r.period_length, r.period_state,
                                            r.period_entry_battery};
                        if (r.prev_delta == 1) {
                            stats.wed_samples.push_back(sample);
                            stats.wed.add(sample.length);
                            stats.wed_by_state[sample.process_state].add(sample.length);
                        } else {
                            sample.process_state = -1;
                            stats.ced_samples.push_back(sample);
                            stats.ced.add(sample.length);
                        }
                    }
                    r.period_start = slot;
                    r.period_length = 0;
                    r.period_state = static_cast<std::int8_t>(r.x);
                    r.period_entry_battery = static_cast<std::int8_t>(r.b);
                }
                ++r.period_length;
                r.prev_delta = delta;

                if (live) {
                    double lam = static_cast<double>(r.lambda);
                    double pen = config.penalty.value(r.x, r.lambda);
                    dev_aoii[d] += lam;
                    dev_penalty[d] += pen;
                }
            }

            if (trace && tracked[d]) {
                *trace << slot << ',' << d << ',' << r.x << ',' << r.x_hat << ',' << r.b << ','
                       << int(transmitted[d]) << ',' << (decoded && tx_dev == d ? 1 : 0) << ','
                       << r.lambda << '\n';
            }
        }

        if (config.track_occupancy && live) {
            std::fill(occ_counts_vec.begin(), occ_counts_vec.end(), 0);
            for (int d = 1; d < U; ++d) ++occ_counts_vec[pb_index(dev[d].x, dev[d].b, E)];
            long l_idx = profile_rank(occ_counts_vec);
            int s = static_cast<int>(
                ((2 * dev[0].x + dev[0].x_hat) * (E + 1) + dev[0].b) * occ_profiles + l_idx);
            ++stats.occupancy_counts[s];
            ++occ_batch[s];
            ++stats.occupancy_slots;
            if (stats.occupancy_slots % occ_batch_len == 0) {
                stats.occupancy_batches.push_back(occ_batch);
                std::fill(occ_batch.begin(), occ_batch.end(), 0);
            }
        }
    }

    stats.slots = config.num_slots - warmup;
    stats.device_slots = static_cast<std::int64_t>(stats.slots) * stats.devices_tracked;
    for (int d = 0; d < U; ++d) {
        if (!tracked[d]) continue;
        stats.aoii_slot_sum += dev_aoii[d];
        stats.penalty_slot_sum += dev_penalty[d];
        stats.per_device_aoii.push_back(dev_aoii[d] / stats.slots);
        stats.per_device_penalty.push_back(dev_penalty[d] / stats.slots);
    }
    return stats;
}

SimStats merge_stats(const std::vector<SimStats>& parts) {
    if (parts.empty()) throw std::invalid_argument("merge_stats: nothing to merge");
    SimStats out = parts.front();
    for (size_t i = 1; i < parts.size(); ++i) {
        const SimStats& p = parts[i];
        out.slots += p.slots;
        out.device_slots += p.device_slots;
        out.aoii_slot_sum += p.aoii_slot_sum;
        out.penalty_slot_sum += p.penalty_slot_sum;
        out.wed.merge(p.wed);
        out.ced.merge(p.ced);
        for (int x = 0; x < 2; ++x) out.wed_by_state[x].merge(p.wed_by_state[x]);
        out.wed_samples.insert(out.wed_samples.end(), p.wed_samples.begin(), p.wed_samples.end());
        out.ced_samples.insert(out.ced_samples.end(), p.ced_samples.begin(), p.ced_samples.end());
        out.critical_periods += p.critical_periods;
        out.critical_missed += p.critical_missed;
        out.per_device_aoii.insert(out.per_device_aoii.end(), p.per_device_aoii.begin(),
                                   p.per_device_aoii.end());
        out.per_device_penalty.insert(out.per_device_penalty.end(), p.per_device_penalty.begin(),
                                      p.per_device_penalty.end());
        if (!p.occupancy_counts.empty()) {
            if (out.occupancy_counts.empty())
                out.occupancy_counts.assign(p.occupancy_counts.size(), 0);
            for (size_t s = 0; s < p.occupancy_counts.size(); ++s)
                out.occupancy_counts[s] += p.occupancy_counts[s];
            out.occupancy_batches.insert(out.occupancy_batches.end(), p.occupancy_batches.begin(),
                                         p.occupancy_batches.end());
            out.occupancy_slots += p.occupancy_slots;
        }
    }
    return out;
}

MepEstimate empirical_mep(const SimStats& stats, double z) {
    if (stats.critical_periods < 1)
        throw std::runtime_error("empirical_mep: no critical period observed");
    const double n = static_cast<double>(stats.critical_periods);
    const double phat = static_cast<double>(stats.critical_missed) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double center = (phat + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    return {phat, center - half, center + half, stats.critical_missed, stats.critical_periods};
}

} // namespace ehaloha
