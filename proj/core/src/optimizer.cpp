#include "ehaloha/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>

#include "ehaloha/validate.hpp"

namespace ehaloha {

namespace {

constexpr double kZLimit = 20.0;

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double logit(double p) {
    if (p <= logistic(-kZLimit)) return -kZLimit;
    if (p >= logistic(kZLimit)) return kZLimit;
    return std::log(p / (1.0 - p));
}

std::vector<double> to_pi(const std::vector<double>& z) {
    std::vector<double> p(z.size());
    for (size_t i = 0; i < z.size(); ++i) p[i] = logistic(std::clamp(z[i], -kZLimit, kZLimit));
    return p;
}

struct NelderMeadOutcome {
    std::vector<double> best_z;
    double best_value = std::numeric_limits<double>::infinity();
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
};

NelderMeadOutcome nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                              const std::vector<double>& z0, int max_evaluations,
                              double tolerance) {
    const int d = static_cast<int>(z0.size());
    NelderMeadOutcome out;
    int evals = 0;
    auto eval = [&](const std::vector<double>& z) {
        ++evals;
        double v = f(z);
        if (v < out.best_value) {
            out.best_value = v;
            out.best_z = z;
        }
        return v;
    };

    // Reflection / expansion / contraction / shrink with the standard
    // coefficients 1, 2, 0.5, 0.5.
    const double alpha = 1.0, gamma = 2.0, beta = 0.5, delta = 0.5;
    const double step = 0.5;

    std::vector<std::vector<double>> simplex(d + 1, z0);
    std::vector<double> value(d + 1, std::numeric_limits<double>::infinity());
    for (int i = 1; i <= d; ++i) simplex[i][i - 1] += step;
    for (int i = 0; i <= d && evals < max_evaluations; ++i) value[i] = eval(simplex[i]);

    std::vector<int> order(d + 1);
    while (evals < max_evaluations) {
        ++out.iterations;
        for (int i = 0; i <= d; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return value[a] < value[b]; });

        double diameter = 0.0;
        for (int i = 1; i <= d; ++i)
            for (int k = 0; k < d; ++k)
                diameter = std::max(diameter,
                                    std::abs(simplex[order[i]][k] - simplex[order[0]][k]));
        if (diameter < tolerance) {
            out.converged = true;
            break;
        }

        const int worst = order[d];
        std::vector<double> centroid(d, 0.0);
        for (int i = 0; i < d; ++i)
            for (int k = 0; k < d; ++k) centroid[k] += simplex[order[i]][k] / d;

        auto blend = [&](double coeff) {
            std::vector<double> z(d);
            for (int k = 0; k < d; ++k) {
                z[k] = std::clamp(centroid[k] + coeff * (centroid[k] - simplex[worst][k]),
                                  -kZLimit, kZLimit);
            }
            return z;
        };

        std::vector<double> reflected = blend(alpha);
        double fr = eval(reflected);
        if (fr < value[order[0]]) {
            std::vector<double> expanded = blend(alpha * gamma);
            double fe = eval(expanded);
            if (fe < fr) {
                simplex[worst] = std::move(expanded);
                value[worst] = fe;
            } else {
                simplex[worst] = std::move(reflected);
                value[worst] = fr;
            }
        } else if (fr < value[order[d - 1]]) {
            simplex[worst] = std::move(reflected);
            value[worst] = fr;
        } else {
            bool outside = fr < value[worst];
            std::vector<double> contracted = blend(outside ? alpha * beta : -beta);
            double fc = eval(contracted);
            if (fc < std::min(fr, value[worst])) {
                simplex[worst] = std::move(contracted);
                value[worst] = fc;
            } else {
                // Shrink toward the best vertex.
                for (int i = 1; i <= d; ++i) {
                    int v = order[i];
                    for (int k = 0; k < d; ++k)
                        simplex[v][k] =
                            simplex[order[0]][k] + delta * (simplex[v][k] - simplex[order[0]][k]);
                    if (evals >= max_evaluations) break;
                    value[v] = eval(simplex[v]);
                }
            }
        }
    }
    out.evaluations = evals;
    if (out.best_z.empty()) out.best_z = z0;
    return out;
}

} // namespace

std::string to_string(OptimizationTarget t) {
    return t == OptimizationTarget::AverageAoii ? "aoii" : "penalty";
}

OptimizationTarget optimization_target_from_string(const std::string& name) {
    if (name == "aoii") return OptimizationTarget::AverageAoii;
    if (name == "penalty") return OptimizationTarget::AveragePenalty;
    throw std::invalid_argument("unknown objective: " + name + " (expected aoii|penalty)");
}

Objective::Objective(Scenario sc, StrategyClass cls, OptimizationTarget target,
                     PenaltySpec penalty, const DecodingModel& model)
    : scenario_(std::move(sc)), cls_(cls), target_(target), penalty_(penalty), model_(&model),
      layout_(cls, scenario_.battery_capacity) {
    require_valid(scenario_);
    require_valid(penalty_);
}

double Objective::evaluate(const Strategy& st) const {
    try {
        ReducedChain chain = build_reduced_chain(scenario_, st, *model_);
        WedResult wed = wed_phase_type(chain);
        CedResult ced = ced_phase_type(chain);
        double mean_ced = markov::raw_moment(ced.ph, 1);
        double value;
        if (target_ == OptimizationTarget::AverageAoii) {
            value = average_aoii(wed, mean_ced);
        } else {
            double mean_wed = markov::raw_moment(wed.ph, 1);
            value = average_penalty(gamma_power(wed, penalty_), mean_wed, mean_ced);
        }
        return std::isfinite(value) ? value : std::numeric_limits<double>::infinity();
    } catch (const std::exception&) {
        return std::numeric_limits<double>::infinity();
    }
}

double Objective::evaluate_free(std::span<const double> free_params) const {
    return evaluate(layout_.make_strategy(free_params));
}

OptResult optimize(const Objective& objective, const OptimizeOptions& options) {
    if (options.starts < 1) throw std::invalid_argument("optimize: starts must be >= 1");
    const FreeParameterLayout& layout = objective.layout();
    const int d = layout.count();

    auto f = [&](const std::vector<double>& z) { return objective.evaluate_free(to_pi(z)); };

    // Start 0: midpoint. Then warm starts, then seeded uniform draws.
    std::vector<std::vector<double>> start_points;
    start_points.emplace_back(d, 0.0);
    for (const auto& warm : options.warm_starts) {
        if (static_cast<int>(warm.size()) != d)
            throw std::invalid_argument("optimize: warm start has wrong dimension");
        std::vector<double> z(d);
        for (int k = 0; k < d; ++k) z[k] = logit(warm[k]);
        start_points.push_back(std::move(z));
    }
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unif(-4.0, 4.0);
    while (static_cast<int>(start_points.size()) <
           std::max<int>(options.starts, 1 + static_cast<int>(options.warm_starts.size()))) {
        std::vector<double> z(d);
        for (double& v : z) v = unif(rng);
        start_points.push_back(std::move(z));
    }

    std::vector<NelderMeadOutcome> outcomes(start_points.size());
    for (size_t s = 0; s < start_points.size(); ++s)
        outcomes[s] =
            nelder_mead(f, start_points[s], options.max_evaluations_per_start,
                        options.simplex_tolerance);

    OptResult result{Strategy(layout.strategy_class(), layout.battery_capacity())};
    result.best_value = std::numeric_limits<double>::infinity();
    for (size_t s = 0; s < outcomes.size(); ++s) {
        const auto& o = outcomes[s];
        result.traces.push_back({static_cast<int>(s), o.iterations, o.evaluations, o.best_value,
                                 o.converged});
        if (o.best_value < result.best_value) {
            result.best_value = o.best_value;
            result.best_start = static_cast<int>(s);
        }
    }
    // Polish: one more local descent from the overall best point.
    if (result.best_start >= 0 &&
        std::isfinite(result.best_value)) {
        NelderMeadOutcome polish =
            nelder_mead(f, outcomes[result.best_start].best_z, options.max_evaluations_per_start,
                        options.simplex_tolerance);
        if (polish.best_value < result.best_value) {
            result.best_value = polish.best_value;
            outcomes[result.best_start] = polish;
        }
        result.best_strategy = layout.make_strategy(to_pi(outcomes[result.best_start].best_z));
    }
    return result;
}

namespace {

// Express a reactive/random solution in hybrid free-parameter coordinates.
std::vector<double> expand_to_hybrid(const Strategy& st) {
    const int E = st.battery_capacity();
    std::vector<double> free(4 * E, 0.0);
    for (int pair = 0; pair < kNumTransitionPairs; ++pair)
        for (int b = 1; b <= E; ++b) free[pair * E + b - 1] = st.pi_pair(pair, b);
    return free;
}

} // namespace

std::vector<SweepCell> evaluate_strategy_table(const Scenario& base, const SweepSpec& spec,
                                               const DecodingModel& model) {
    if (spec.uqbar_grid.empty()) throw std::invalid_argument("sweep: empty grid");
    if (spec.classes.empty()) throw std::invalid_argument("sweep: no strategy classes");
    for (double u : spec.uqbar_grid)
        if (u <= 0.0) throw std::invalid_argument("sweep: grid values must be > 0");

    std::vector<SweepCell> cells;
    // Previous grid point's solutions per class token, for continuation.
    std::map<std::string, std::vector<double>> carry;

    for (double uqbar : spec.uqbar_grid) {
        Scenario sc;
        try {
            sc = with_uqbar(base, uqbar, spec.q_ratio);
            require_valid(sc);
        } catch (const std::exception& e) {
            for (const auto& cls : spec.classes)
                cells.push_back({uqbar, cls, true, e.what()});
            continue;
        }

        // Class-tied solutions found at this grid point seed the hybrid runs.
        std::vector<std::vector<double>> hybrid_seeds;

        for (const auto& token : spec.classes) {
            SweepCell cell;
            cell.uqbar = uqbar;
            cell.strategy_class = token;
            try {
                const bool aoii_optimal = token == "aoii-optimal";
                StrategyClass cls =
                    aoii_optimal ? StrategyClass::Hybrid : strategy_class_from_string(token);
                OptimizationTarget target =
                    aoii_optimal ? OptimizationTarget::AverageAoii : spec.target;

                Objective objective(sc, cls, target, spec.penalty, model);
                OptimizeOptions options = spec.options;
                if (spec.continuation) {
                    auto it = carry.find(token);
                    if (it != carry.end()) options.warm_starts.push_back(it->second);
                }
                if (cls == StrategyClass::Hybrid)
                    for (const auto& seed : hybrid_seeds) options.warm_starts.push_back(seed);

                OptResult opt = optimize(objective, options);
                carry[token] = objective.layout().extract(opt.best_strategy);
                if (cls != StrategyClass::Hybrid)
                    hybrid_seeds.push_back(expand_to_hybrid(opt.best_strategy));

                cell.starts = static_cast<int>(opt.traces.size());
                for (const auto& t : opt.traces) cell.total_evaluations += t.evaluations;
                cell.best_start = opt.best_start;
                for (const auto& t : opt.traces)
                    if (t.start_index == opt.best_start) cell.converged = t.converged;

                // Report the sweep's own target for the pseudo-class.
                if (aoii_optimal && spec.target == OptimizationTarget::AveragePenalty) {
                    Objective penalty_objective(sc, StrategyClass::Hybrid,
                                                OptimizationTarget::AveragePenalty, spec.penalty,
                                                model);
                    cell.objective_value = penalty_objective.evaluate(opt.best_strategy);
                } else {
                    cell.objective_value = opt.best_value;
                }
                cell.mep = misdetection_probability(build_reduced_chain(sc, opt.best_strategy, model));
                cell.strategy = opt.best_strategy;
            } catch (const std::exception& e) {
                cell.failed = true;
                cell.error = e.what();
            }
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

} // namespace ehaloha
