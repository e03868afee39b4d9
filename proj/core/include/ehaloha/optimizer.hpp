#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ehaloha/analysis.hpp"
#include "ehaloha/channel.hpp"
#include "ehaloha/penalty.hpp"
#include "ehaloha/scenario.hpp"
#include "ehaloha/strategy.hpp"

namespace ehaloha {

/// What the optimizer minimizes.
enum class OptimizationTarget { AverageAoii, AveragePenalty };

std::string to_string(OptimizationTarget t);
OptimizationTarget optimization_target_from_string(const std::string& name);

/// Pure, deterministic objective: strategy -> approximate average penalty
/// (or average AoII) for a fixed scenario and decoding model. Evaluation
/// failures surface as +infinity.
class Objective {
  public:
    Objective(Scenario sc, StrategyClass cls, OptimizationTarget target, PenaltySpec penalty,
              const DecodingModel& model);

    double evaluate(const Strategy& st) const;
    double evaluate_free(std::span<const double> free_params) const;

    const Scenario& scenario() const { return scenario_; }
    const FreeParameterLayout& layout() const { return layout_; }
    OptimizationTarget target() const { return target_; }
    const PenaltySpec& penalty() const { return penalty_; }

  private:
    Scenario scenario_;
    StrategyClass cls_;
    OptimizationTarget target_;
    PenaltySpec penalty_;
    const DecodingModel* model_;
    FreeParameterLayout layout_;
};

struct OptimizeOptions {
    int starts = 10;
    int max_evaluations_per_start = 2000;
    std::uint64_t seed = 1;
    double simplex_tolerance = 1e-6;
    /// Additional fixed starting points (free-parameter vectors in [0,1]).
    std::vector<std::vector<double>> warm_starts;
};

struct StartTrace {
    int start_index = 0;
    int iterations = 0;
    int evaluations = 0;
    double final_value = 0.0;
    bool converged = false;
};

struct OptResult {
    Strategy best_strategy;
    double best_value = 0.0;
    int best_start = -1;
    std::vector<StartTrace> traces;
};

/// Multi-start Nelder-Mead over the free parameters of the strategy class,
/// searched unconstrained through the logistic transform pi = 1/(1+e^-z)
/// with |z| <= 20. Start 0 is the midpoint (all pi = 0.5); warm starts
/// follow; the remaining starts are seeded uniform draws in z-space.
OptResult optimize(const Objective& objective, const OptimizeOptions& options);

/// One cell of a figure-reproduction sweep.
struct SweepCell {
    double uqbar = 0.0;
    std::string strategy_class; ///< class name, or "aoii-optimal" pseudo-class
    bool failed = false;
    std::string error;
    double objective_value = 0.0;
    double mep = 0.0;
    int starts = 0;
    std::int64_t total_evaluations = 0;
    int best_start = -1;
    bool converged = false;
    std::optional<Strategy> strategy;
};

struct SweepSpec {
    std::vector<double> uqbar_grid;
    double q_ratio = 1.0;
    std::vector<std::string> classes; ///< reactive/random/hybrid/aoii-optimal
    OptimizationTarget target = OptimizationTarget::AverageAoii;
    PenaltySpec penalty{};
    OptimizeOptions options{};
    /// Reuse each grid point's solution as a warm start for the next one.
    bool continuation = true;
};

/// Optimizes every (grid point, class) cell and evaluates the MEP of each
/// optimized strategy. The "aoii-optimal" pseudo-class optimizes a hybrid
/// strategy for the average AoII and reports its value under the sweep's
/// penalty target. Per-cell failures are recorded without aborting.
std::vector<SweepCell> evaluate_strategy_table(const Scenario& base, const SweepSpec& spec,
                                               const DecodingModel& model);

} // namespace ehaloha
