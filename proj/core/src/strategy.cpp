#include "ehaloha/strategy.hpp"

#include <stdexcept>

namespace ehaloha {

std::string to_string(StrategyClass cls) {
    switch (cls) {
    case StrategyClass::Reactive: return "reactive";
    case StrategyClass::Random: return "random";
    case StrategyClass::Hybrid: return "hybrid";
    }
    return "?";
}

StrategyClass strategy_class_from_string(const std::string& name) {
    if (name == "reactive") return StrategyClass::Reactive;
    if (name == "random") return StrategyClass::Random;
    if (name == "hybrid") return StrategyClass::Hybrid;
    throw std::invalid_argument("unknown strategy class: " + name);
}

FreeParameterLayout::FreeParameterLayout(StrategyClass cls, int battery_capacity)
    : cls_(cls), capacity_(battery_capacity) {
    if (battery_capacity < 1)
        throw std::invalid_argument("FreeParameterLayout: battery capacity must be >= 1");
    const int E = battery_capacity;
    switch (cls) {
    case StrategyClass::Reactive:
        count_ = 2 * E;
        slots_.resize(count_);
        for (int b = 1; b <= E; ++b) {
            slots_[b - 1] = {{transition_pair(0, 1), b}};
            slots_[E + b - 1] = {{transition_pair(1, 0), b}};
        }
        break;
    case StrategyClass::Random:
        count_ = E;
        slots_.resize(count_);
        for (int b = 1; b <= E; ++b)
            slots_[b - 1] = {{0, b}, {1, b}, {2, b}, {3, b}};
        break;
    case StrategyClass::Hybrid:
        count_ = 4 * E;
        slots_.resize(count_);
        for (int pair = 0; pair < kNumTransitionPairs; ++pair)
            for (int b = 1; b <= E; ++b)
                slots_[pair * E + b - 1] = {{pair, b}};
        break;
    }
}

Strategy FreeParameterLayout::make_strategy(std::span<const double> values) const {
    if (static_cast<int>(values.size()) != count_)
        throw std::invalid_argument("make_strategy: expected " + std::to_string(count_) +
                                    " free parameters, got " + std::to_string(values.size()));
    Strategy st(cls_, capacity_);
    for (int k = 0; k < count_; ++k)
        for (auto [pair, b] : slots_[k])
            st.set_pi(pair / 2, pair % 2, b, values[k]);
    return st;
}

std::vector<double> FreeParameterLayout::extract(const Strategy& st) const {
    if (st.battery_capacity() != capacity_)
        throw std::invalid_argument("extract: battery capacity mismatch");
    std::vector<double> values(count_);
    for (int k = 0; k < count_; ++k)
        values[k] = st.pi_pair(slots_[k].front().first, slots_[k].front().second);
    return values;
}

} // namespace ehaloha
