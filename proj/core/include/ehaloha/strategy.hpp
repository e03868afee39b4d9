#pragma once

#include <span>
#include <string>
#include <vector>

namespace ehaloha {

/// Transmission strategy families, ordered from most to least constrained.
enum class StrategyClass {
    Reactive, ///< transmit only on a state change: pi^(00) = pi^(11) = 0
    Random,   ///< transition-agnostic: pi_b identical across all (i,j)
    Hybrid,   ///< free pi_b^(ij) for every transition pair
};

std::string to_string(StrategyClass cls);
StrategyClass strategy_class_from_string(const std::string& name);

/// Index of the transition pair (from,to) in the fixed order 00,01,10,11.
constexpr int transition_pair(int from, int to) { return 2 * from + to; }
constexpr int kNumTransitionPairs = 4;

/// Transmission-probability matrix pi_b^(ij), indexed by transition pair
/// (i,j) in {00,01,10,11} and battery level b in [0:E]. Level 0 is stored
/// but always 0: an empty battery cannot transmit.
class Strategy {
  public:
    Strategy(StrategyClass cls, int battery_capacity)
        : cls_(cls), capacity_(battery_capacity),
          pi_(kNumTransitionPairs * (battery_capacity + 1), 0.0) {}

    StrategyClass strategy_class() const { return cls_; }
    int battery_capacity() const { return capacity_; }

    double pi(int from, int to, int b) const {
        return pi_[transition_pair(from, to) * (capacity_ + 1) + b];
    }
    double pi_pair(int pair, int b) const { return pi_[pair * (capacity_ + 1) + b]; }

    /// Raw setter; class tying is not enforced here but by validate() and
    /// by the free-parameter constructors below.
    void set_pi(int from, int to, int b, double value) {
        pi_[transition_pair(from, to) * (capacity_ + 1) + b] = value;
    }

  private:
    StrategyClass cls_;
    int capacity_;
    std::vector<double> pi_;
};

/// Mapping between a strategy class's free parameters and the tied slots of
/// the full pi matrix. Free parameters cover battery levels [1:E] only.
///
/// Orders: reactive -> (01,b=1..E) then (10,b=1..E); random -> b=1..E;
/// hybrid -> pair-major (00,01,10,11) x (b=1..E).
class FreeParameterLayout {
  public:
    FreeParameterLayout(StrategyClass cls, int battery_capacity);

    StrategyClass strategy_class() const { return cls_; }
    int battery_capacity() const { return capacity_; }
    int count() const { return count_; }

    /// (pair, b) slots of the pi matrix tied to free parameter k.
    const std::vector<std::pair<int, int>>& slots(int k) const { return slots_[k]; }

    Strategy make_strategy(std::span<const double> values) const;
    std::vector<double> extract(const Strategy& st) const;

  private:
    StrategyClass cls_;
    int capacity_;
    int count_;
    std::vector<std::vector<std::pair<int, int>>> slots_;
};

} // namespace ehaloha
