#include "ehaloha/validate.hpp"

#include <cmath>
#include <sstream>

namespace ehaloha {

namespace {

bool is_probability(double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; }

void check_prob(std::vector<ValidationIssue>& out, const std::string& field, double v) {
    if (!is_probability(v))
        out.push_back({field, "must be a probability in [0,1]"});
}

} // namespace

std::vector<ValidationIssue> validate(const Scenario& sc) {
    std::vector<ValidationIssue> out;
    if (sc.num_devices < 1) out.push_back({"num_devices", "must be a positive integer"});
    if (sc.battery_capacity < 1) out.push_back({"battery_capacity", "must be a positive integer"});
    check_prob(out, "q01", sc.q01);
    check_prob(out, "q10", sc.q10);
    if (is_probability(sc.q01) && sc.q01 == 0.0) out.push_back({"q01", "process must be irreducible"});
    if (is_probability(sc.q10) && sc.q10 == 0.0) out.push_back({"q10", "process must be irreducible"});
    check_prob(out, "gamma0", sc.gamma0);
    check_prob(out, "gamma1", sc.gamma1);
    if (is_probability(sc.gamma0) && sc.gamma0 == 0.0) out.push_back({"gamma0", "harvesting rate must be > 0"});
    if (is_probability(sc.gamma1) && sc.gamma1 == 0.0) out.push_back({"gamma1", "harvesting rate must be > 0"});
    if (sc.slot_channel_uses < 1) out.push_back({"slot_channel_uses", "must be a positive integer"});
    if (!(std::isfinite(sc.rate_bits) && sc.rate_bits > 0.0))
        out.push_back({"rate_bits", "must be > 0"});
    if (!(std::isfinite(sc.noise_variance) && sc.noise_variance > 0.0))
        out.push_back({"noise_variance", "must be > 0 (linear scale)"});
    return out;
}

std::vector<ValidationIssue> validate(const Strategy& st) {
    std::vector<ValidationIssue> out;
    const int E = st.battery_capacity();
    if (E < 1) {
        out.push_back({"strategy.battery_capacity", "must be >= 1"});
        return out;
    }
    static const char* pair_names[] = {"00", "01", "10", "11"};
    for (int pair = 0; pair < kNumTransitionPairs; ++pair) {
        for (int b = 0; b <= E; ++b) {
            double v = st.pi_pair(pair, b);
            if (!is_probability(v)) {
                out.push_back({std::string("pi[") + pair_names[pair] + "][" + std::to_string(b) + "]",
                               "must be a probability in [0,1]"});
            }
        }
        if (st.pi_pair(pair, 0) != 0.0)
            out.push_back({std::string("pi[") + pair_names[pair] + "][0]",
                           "battery-0 transmission must be 0"});
    }
    if (st.strategy_class() == StrategyClass::Reactive) {
        for (int b = 0; b <= E; ++b) {
            if (st.pi(0, 0, b) != 0.0 || st.pi(1, 1, b) != 0.0) {
                out.push_back({"pi", "reactive strategy requires pi[00] = pi[11] = 0"});
                break;
            }
        }
    } else if (st.strategy_class() == StrategyClass::Random) {
        for (int b = 0; b <= E; ++b) {
            double v = st.pi_pair(0, b);
            if (st.pi_pair(1, b) != v || st.pi_pair(2, b) != v || st.pi_pair(3, b) != v) {
                out.push_back({"pi", "random strategy requires identical pi_b across transition pairs"});
                break;
            }
        }
    }
    return out;
}

std::vector<ValidationIssue> validate(const PenaltySpec& spec) {
    std::vector<ValidationIssue> out;
    if (spec.alpha0 < 0) out.push_back({"alpha0", "must be a nonnegative integer"});
    if (spec.alpha1 < 0) out.push_back({"alpha1", "must be a nonnegative integer"});
    return out;
}

std::vector<ValidationIssue> validate(const Scenario& sc, const Strategy& st) {
    std::vector<ValidationIssue> out = validate(sc);
    auto st_issues = validate(st);
    out.insert(out.end(), st_issues.begin(), st_issues.end());
    if (sc.battery_capacity >= 1 && st.battery_capacity() != sc.battery_capacity)
        out.push_back({"strategy.pi", "battery dimension does not match scenario battery_capacity"});
    return out;
}

std::string format_issues(const std::vector<ValidationIssue>& issues) {
    std::ostringstream os;
    for (size_t i = 0; i < issues.size(); ++i) {
        if (i) os << "; ";
        os << issues[i].field << ": " << issues[i].message;
    }
    return os.str();
}

namespace {
void throw_if_any(const std::vector<ValidationIssue>& issues) {
    if (!issues.empty()) throw std::invalid_argument(format_issues(issues));
}
} // namespace

void require_valid(const Scenario& sc) { throw_if_any(validate(sc)); }
void require_valid(const Scenario& sc, const Strategy& st) { throw_if_any(validate(sc, st)); }
void require_valid(const PenaltySpec& spec) { throw_if_any(validate(spec)); }

} // namespace ehaloha
