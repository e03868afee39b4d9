#include "ehaloha/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "ehaloha/analysis.hpp"
#include "ehaloha/io.hpp"
#include "ehaloha/optimizer.hpp"
#include "ehaloha/simulator.hpp"
#include "ehaloha/validate.hpp"

namespace ehaloha {

namespace {

namespace fs = std::filesystem;

constexpr const char* kToolVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path.string());
    out << content;
}

// Options shared by every subcommand.
struct CommonOptions {
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    int threads = 1;
};

void add_common(CLI::App* cmd, CommonOptions& common) {
    cmd->add_option("--out", common.out_dir, "Output directory (created if missing)");
    cmd->add_option("--seed", common.seed, "Master seed");
    cmd->add_option("--threads", common.threads, "Worker threads for replications")
        ->check(CLI::PositiveNumber);
}

struct ScenarioOptions {
    std::string scenario_path;
    std::optional<double> noise_db;
    std::optional<double> uqbar;
    double q_ratio = 1.0;
};

void add_scenario(CLI::App* cmd, ScenarioOptions& opts) {
    cmd->add_option("--scenario", opts.scenario_path, "Scenario JSON file")->required();
    cmd->add_option("--noise-db", opts.noise_db,
                    "Override noise variance, given in dB (converted to linear)");
    cmd->add_option("--uqbar", opts.uqbar,
                    "Override q01/q10 so that U*q_bar equals this value");
    cmd->add_option("--q-ratio", opts.q_ratio, "q01/q10 ratio used with --uqbar");
}

Scenario load_scenario(const ScenarioOptions& opts) {
    Scenario sc = scenario_from_json(read_file(opts.scenario_path));
    if (opts.noise_db) sc.noise_variance = std::pow(10.0, *opts.noise_db / 10.0);
    if (opts.uqbar) sc = with_uqbar(sc, *opts.uqbar, opts.q_ratio);
    auto issues = validate(sc);
    if (!issues.empty()) throw InputError("invalid scenario: " + format_issues(issues));
    return sc;
}

struct StrategyOptions {
    std::string strategy_path;
    std::string strategy_class;
    std::vector<double> pi_values;
};

void add_strategy(CLI::App* cmd, StrategyOptions& opts) {
    auto* file = cmd->add_option("--strategy", opts.strategy_path, "Strategy JSON file");
    auto* cls = cmd->add_option("--class", opts.strategy_class,
                                "Strategy class (reactive|random|hybrid); combine with --pi");
    cmd->add_option("--pi", opts.pi_values,
                    "Free transmission probabilities for --class (single value broadcasts)")
        ->delimiter(',');
    file->excludes(cls);
}

Strategy load_strategy(const StrategyOptions& opts, const Scenario& sc) {
    if (!opts.strategy_path.empty()) {
        Strategy st = strategy_from_json(read_file(opts.strategy_path));
        auto issues = validate(sc, st);
        if (!issues.empty()) throw InputError("invalid strategy: " + format_issues(issues));
        return st;
    }
    if (opts.strategy_class.empty())
        throw InputError("provide either --strategy FILE or --class NAME");
    StrategyClass cls = strategy_class_from_string(opts.strategy_class);
    FreeParameterLayout layout(cls, sc.battery_capacity);
    std::vector<double> values = opts.pi_values;
    if (values.empty()) values.assign(layout.count(), 0.5);
    if (values.size() == 1) values.assign(layout.count(), values.front());
    if (static_cast<int>(values.size()) != layout.count())
        throw InputError("--pi expects 1 or " + std::to_string(layout.count()) +
                         " values for class " + opts.strategy_class);
    Strategy st = layout.make_strategy(values);
    auto issues = validate(sc, st);
    if (!issues.empty()) throw InputError("invalid strategy: " + format_issues(issues));
    return st;
}

void write_manifest(const fs::path& out_dir, const std::string& subcommand,
                    const std::vector<std::string>& argv, std::uint64_t seed,
                    const std::vector<std::string>& outputs) {
    nlohmann::json doc{{"tool", "ehaloha"},
                       {"version", kToolVersion},
                       {"subcommand", subcommand},
                       {"argv", argv},
                       {"seed", seed},
                       {"outputs", outputs}};
    write_file(out_dir / "manifest.json", doc.dump(2) + "\n");
}

int run_analyze(const CommonOptions& common, const ScenarioOptions& scen,
                const StrategyOptions& strat, int alpha0, int alpha1,
                const std::vector<std::string>& argv) {
    Scenario sc = load_scenario(scen);
    Strategy st = load_strategy(strat, sc);
    PenaltySpec penalty{alpha0, alpha1};
    auto issues = validate(penalty);
    if (!issues.empty()) throw InputError(format_issues(issues));

    NormalApproxDecoding model(sc);
    AnalysisReport report = analyze(sc, st, penalty, model);

    fs::create_directories(common.out_dir);
    fs::path out(common.out_dir);
    write_file(out / "report.json", to_json(report) + "\n");
    write_file(out / "report.csv",
               report_csv_header() + "\n" + report_csv_row(sc, report) + "\n");
    write_manifest(out, "analyze", argv, common.seed, {"report.json", "report.csv"});
    std::cout << to_json(report) << std::endl;
    return kExitOk;
}

int run_simulate(const CommonOptions& common, const ScenarioOptions& scen,
                 const StrategyOptions& strat, int alpha0, int alpha1, std::int64_t slots,
                 std::int64_t warmup, int reps, const std::string& trace_path,
                 const std::vector<std::string>& argv) {
    Scenario sc = load_scenario(scen);
    Strategy st = load_strategy(strat, sc);
    if (reps < 1) throw InputError("--reps must be >= 1");
    if (warmup < 0 || warmup >= slots) throw InputError("need 0 <= warmup < slots");

    NormalApproxDecoding model(sc);
    SimConfig config;
    config.num_slots = slots;
    config.warmup_slots = warmup;
    config.penalty = PenaltySpec{alpha0, alpha1};
    auto issues = validate(config.penalty);
    if (!issues.empty()) throw InputError(format_issues(issues));

    fs::create_directories(common.out_dir);
    fs::path out(common.out_dir);

    std::vector<SimStats> parts(reps);
    auto run_rep = [&](int rep) {
        SimConfig rep_config = config;
        rep_config.seed = replication_seed(common.seed, rep);
        if (!trace_path.empty() && rep == 0) {
            std::ofstream trace(out / trace_path);
            trace << trace_csv_header() << "\n";
            return run_simulation(sc, st, model, rep_config, &trace);
        }
        return run_simulation(sc, st, model, rep_config, nullptr);
    };
    if (common.threads > 1 && reps > 1) {
        // Waves of at most --threads concurrent replications; merge order is
        // fixed, so scheduling cannot change the pooled result.
        for (int base = 0; base < reps; base += common.threads) {
            const int wave = std::min(common.threads, reps - base);
            std::vector<std::future<SimStats>> futures;
            futures.reserve(wave);
            for (int k = 0; k < wave; ++k)
                futures.push_back(std::async(std::launch::async, run_rep, base + k));
            for (int k = 0; k < wave; ++k) parts[base + k] = futures[k].get();
        }
    } else {
        for (int rep = 0; rep < reps; ++rep) parts[rep] = run_rep(rep);
    }
    SimStats stats = merge_stats(parts);
    stats.seed = common.seed;

    write_file(out / "stats.json", to_json(stats) + "\n");
    std::vector<std::string> outputs{"stats.json"};
    if (!trace_path.empty()) outputs.push_back(trace_path);
    write_manifest(out, "simulate", argv, common.seed, outputs);
    std::cout << to_json(stats) << std::endl;
    return kExitOk;
}

int run_optimize(const CommonOptions& common, const ScenarioOptions& scen,
                 const std::string& cls_name, const std::string& objective_name, int alpha0,
                 int alpha1, int starts, int budget, const std::vector<std::string>& argv) {
    Scenario sc = load_scenario(scen);
    StrategyClass cls = strategy_class_from_string(cls_name);
    OptimizationTarget target = optimization_target_from_string(objective_name);
    PenaltySpec penalty{alpha0, alpha1};
    auto issues = validate(penalty);
    if (!issues.empty()) throw InputError(format_issues(issues));

    NormalApproxDecoding model(sc);
    Objective objective(sc, cls, target, penalty, model);
    OptimizeOptions options;
    options.starts = starts;
    options.max_evaluations_per_start = budget;
    options.seed = common.seed;
    OptResult result = optimize(objective, options);

    fs::create_directories(common.out_dir);
    fs::path out(common.out_dir);
    write_file(out / "optresult.json", to_json(result) + "\n");
    write_file(out / "strategy.json", to_json(result.best_strategy) + "\n");
    write_manifest(out, "optimize", argv, common.seed, {"optresult.json", "strategy.json"});
    std::cout << to_json(result) << std::endl;
    return kExitOk;
}

int run_sweep(const CommonOptions& common, const ScenarioOptions& scen, const std::string& grid,
              const std::string& classes_csv, const std::string& objective_name, int alpha0,
              int alpha1, int starts, int budget, bool no_continuation,
              const std::vector<std::string>& argv) {
    Scenario base = load_scenario(scen);

    SweepSpec spec;
    spec.q_ratio = scen.q_ratio;
    spec.target = optimization_target_from_string(objective_name);
    spec.penalty = PenaltySpec{alpha0, alpha1};
    spec.options.starts = starts;
    spec.options.max_evaluations_per_start = budget;
    spec.options.seed = common.seed;
    spec.continuation = !no_continuation;

    std::string grid_values = grid;
    if (grid_values.rfind("uq_bar=", 0) == 0) grid_values = grid_values.substr(7);
    std::istringstream gs(grid_values);
    std::string token;
    while (std::getline(gs, token, ','))
        if (!token.empty()) spec.uqbar_grid.push_back(std::stod(token));
    if (spec.uqbar_grid.empty()) throw InputError("--grid is empty; expected uq_bar=v1,v2,...");

    std::istringstream cs(classes_csv);
    while (std::getline(cs, token, ','))
        if (!token.empty()) spec.classes.push_back(token);
    if (spec.classes.empty()) throw InputError("--classes is empty");
    for (const auto& c : spec.classes)
        if (c != "aoii-optimal") strategy_class_from_string(c); // validates early

    NormalApproxDecoding model(base);
    std::vector<SweepCell> cells = evaluate_strategy_table(base, spec, model);

    fs::create_directories(common.out_dir);
    fs::path out(common.out_dir);
    std::ostringstream csv;
    csv << curves_csv_header() << "\n";
    for (const auto& cell : cells) csv << curves_csv_row(cell) << "\n";
    write_file(out / "curves.csv", csv.str());
    write_manifest(out, "sweep", argv, common.seed, {"curves.csv"});
    std::cout << csv.str();
    return kExitOk;
}

} // namespace

int run_cli(int argc, char** argv) {
    std::vector<std::string> raw_args(argv, argv + argc);

    CLI::App app{"Average-penalty analysis, protocol simulation and strategy optimization "
                 "for energy-harvesting devices over slotted ALOHA"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);

    CommonOptions common;
    ScenarioOptions scen;
    StrategyOptions strat;
    int alpha0 = 1, alpha1 = 1;

    auto* analyze_cmd = app.add_subcommand("analyze", "Closed-form analysis of one strategy");
    add_common(analyze_cmd, common);
    add_scenario(analyze_cmd, scen);
    add_strategy(analyze_cmd, strat);
    analyze_cmd->add_option("--alpha0", alpha0, "Penalty exponent for state 0");
    analyze_cmd->add_option("--alpha1", alpha1, "Penalty exponent for state 1");

    std::int64_t slots = 1'000'000, warmup = 10'000;
    int reps = 1;
    std::string trace_path;
    auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo protocol simulation");
    add_common(simulate_cmd, common);
    add_scenario(simulate_cmd, scen);
    add_strategy(simulate_cmd, strat);
    simulate_cmd->add_option("--alpha0", alpha0, "Penalty exponent for state 0");
    simulate_cmd->add_option("--alpha1", alpha1, "Penalty exponent for state 1");
    simulate_cmd->add_option("--slots", slots, "Slots per replication");
    simulate_cmd->add_option("--warmup", warmup, "Warmup slots discarded before accumulation");
    simulate_cmd->add_option("--reps", reps, "Independent replications (pooled)");
    simulate_cmd->add_option("--trace", trace_path,
                             "Per-slot trace CSV (first replication only; tiny scales)");

    std::string cls_name, objective_name = "aoii";
    int starts = 10, budget = 2000;
    auto* optimize_cmd = app.add_subcommand("optimize", "Optimize one strategy class");
    add_common(optimize_cmd, common);
    add_scenario(optimize_cmd, scen);
    optimize_cmd->add_option("--class", cls_name, "Strategy class")->required();
    optimize_cmd->add_option("--objective", objective_name, "aoii|penalty");
    optimize_cmd->add_option("--alpha0", alpha0, "Penalty exponent for state 0");
    optimize_cmd->add_option("--alpha1", alpha1, "Penalty exponent for state 1");
    optimize_cmd->add_option("--starts", starts, "Nelder-Mead starts");
    optimize_cmd->add_option("--budget", budget, "Objective evaluations per start");

    std::string grid, classes_csv = "reactive,random,hybrid";
    bool no_continuation = false;
    auto* sweep_cmd = app.add_subcommand("sweep", "Optimize classes over a U*q_bar grid");
    add_common(sweep_cmd, common);
    add_scenario(sweep_cmd, scen);
    sweep_cmd->add_option("--grid", grid, "Grid spec: uq_bar=v1,v2,...")->required();
    sweep_cmd->add_option("--classes", classes_csv,
                          "Comma list of reactive|random|hybrid|aoii-optimal");
    sweep_cmd->add_option("--objective", objective_name, "aoii|penalty");
    sweep_cmd->add_option("--alpha0", alpha0, "Penalty exponent for state 0");
    sweep_cmd->add_option("--alpha1", alpha1, "Penalty exponent for state 1");
    sweep_cmd->add_option("--starts", starts, "Nelder-Mead starts per cell");
    sweep_cmd->add_option("--budget", budget, "Objective evaluations per start");
    sweep_cmd->add_flag("--no-continuation", no_continuation,
                        "Do not warm-start cells from the previous grid point");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (analyze_cmd->parsed())
            return run_analyze(common, scen, strat, alpha0, alpha1, raw_args);
        if (simulate_cmd->parsed())
            return run_simulate(common, scen, strat, alpha0, alpha1, slots, warmup, reps,
                                trace_path, raw_args);
        if (optimize_cmd->parsed())
            return run_optimize(common, scen, cls_name, objective_name, alpha0, alpha1, starts,
                                budget, raw_args);
        if (sweep_cmd->parsed())
            return run_sweep(common, scen, grid, classes_csv, objective_name, alpha0, alpha1,
                             starts, budget, no_continuation, raw_args);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kExitInput;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "numerical error: " << e.what() << std::endl;
        return kExitNumerical;
    }
    return kExitInput;
}

} // namespace ehaloha
