#include "ehaloha/io.hpp"

#include <json.hpp>
#include <sstream>

namespace ehaloha {

using nlohmann::json;

namespace {

json parse_document(const std::string& text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw ParseError("document", "not valid JSON");
    return doc;
}

double get_number(const json& doc, const std::string& field) {
    if (!doc.contains(field)) throw ParseError(field, "missing required field");
    if (!doc[field].is_number()) throw ParseError(field, "must be a number");
    return doc[field].get<double>();
}

int get_int(const json& doc, const std::string& field) {
    if (!doc.contains(field)) throw ParseError(field, "missing required field");
    if (!doc[field].is_number_integer()) throw ParseError(field, "must be an integer");
    return doc[field].get<int>();
}

const char* kPairNames[] = {"00", "01", "10", "11"};

json moments_json(const RunningMoments& m) {
    return json{{"count", m.count}, {"mean", m.mean()}, {"stderr", m.stderr_mean()}};
}

} // namespace

std::string to_json(const Scenario& sc) {
    json doc{{"num_devices", sc.num_devices},
             {"battery_capacity", sc.battery_capacity},
             {"q01", sc.q01},
             {"q10", sc.q10},
             {"gamma0", sc.gamma0},
             {"gamma1", sc.gamma1},
             {"slot_channel_uses", sc.slot_channel_uses},
             {"rate_bits", sc.rate_bits},
             {"noise_variance", sc.noise_variance}};
    return doc.dump(2);
}

Scenario scenario_from_json(const std::string& text) {
    json doc = parse_document(text);
    Scenario sc;
    sc.num_devices = get_int(doc, "num_devices");
    sc.battery_capacity = get_int(doc, "battery_capacity");
    sc.q01 = get_number(doc, "q01");
    sc.q10 = get_number(doc, "q10");
    sc.gamma0 = get_number(doc, "gamma0");
    sc.gamma1 = get_number(doc, "gamma1");
    sc.slot_channel_uses = get_int(doc, "slot_channel_uses");
    sc.rate_bits = get_number(doc, "rate_bits");
    sc.noise_variance = get_number(doc, "noise_variance");
    return sc;
}

std::string to_json(const Strategy& st) {
    const int E = st.battery_capacity();
    json pi;
    for (int pair = 0; pair < kNumTransitionPairs; ++pair) {
        json column = json::array();
        for (int b = 0; b <= E; ++b) column.push_back(st.pi_pair(pair, b));
        pi[kPairNames[pair]] = column;
    }
    json doc{{"class", to_string(st.strategy_class())}, {"pi", pi}};
    return doc.dump(2);
}

Strategy strategy_from_json(const std::string& text) {
    json doc = parse_document(text);
    if (!doc.contains("class") || !doc["class"].is_string())
        throw ParseError("class", "missing or not a string");
    StrategyClass cls;
    try {
        cls = strategy_class_from_string(doc["class"].get<std::string>());
    } catch (const std::exception& e) {
        throw ParseError("class", e.what());
    }
    if (!doc.contains("pi") || !doc["pi"].is_object())
        throw ParseError("pi", "missing or not an object keyed by transition pair");
    const json& pi = doc["pi"];
    int E = -1;
    for (const char* name : kPairNames) {
        if (!pi.contains(name) || !pi[name].is_array())
            throw ParseError(std::string("pi.") + name, "missing transition-pair array");
        int size = static_cast<int>(pi[name].size());
        if (E < 0) E = size - 1;
        if (size != E + 1)
            throw ParseError(std::string("pi.") + name, "battery dimension mismatch");
    }
    if (E < 1) throw ParseError("pi", "needs entries for battery levels 0..E with E >= 1");
    Strategy st(cls, E);
    for (int pair = 0; pair < kNumTransitionPairs; ++pair)
        for (int b = 0; b <= E; ++b) {
            const json& v = pi[kPairNames[pair]][b];
            if (!v.is_number())
                throw ParseError(std::string("pi.") + kPairNames[pair] + "[" + std::to_string(b) +
                                     "]",
                                 "must be a number");
            st.set_pi(pair / 2, pair % 2, b, v.get<double>());
        }
    return st;
}

std::string to_json(const AnalysisReport& report) {
    json doc{{"mean_wed", report.mean_wed},
             {"second_wed", report.second_wed},
             {"mean_ced", report.mean_ced},
             {"gamma", report.gamma},
             {"avg_penalty", report.avg_penalty},
             {"avg_aoii", report.avg_aoii},
             {"mep", report.mep},
             {"prob_wrong_state1", report.prob_wrong_state1}};
    return doc.dump(2);
}

std::string to_json(const SimStats& stats) {
    json doc{{"seed", stats.seed},
             {"slots", stats.slots},
             {"devices_tracked", stats.devices_tracked},
             {"device_slots", stats.device_slots},
             {"avg_aoii", stats.avg_aoii()},
             {"avg_penalty", stats.avg_penalty()},
             {"wed", moments_json(stats.wed)},
             {"wed_state0", moments_json(stats.wed_by_state[0])},
             {"wed_state1", moments_json(stats.wed_by_state[1])},
             {"ced", moments_json(stats.ced)},
             {"critical_periods", stats.critical_periods},
             {"critical_missed", stats.critical_missed}};
    if (stats.critical_periods > 0) {
        MepEstimate mep = empirical_mep(stats);
        doc["mep"] = {{"point", mep.point},
                      {"wilson_low", mep.wilson_low},
                      {"wilson_high", mep.wilson_high}};
    }
    return doc.dump(2);
}

std::string to_json(const OptResult& result) {
    json traces = json::array();
    for (const auto& t : result.traces)
        traces.push_back({{"start", t.start_index},
                          {"iterations", t.iterations},
                          {"evaluations", t.evaluations},
                          {"final_value", t.final_value},
                          {"converged", t.converged}});
    json doc{{"best_value", result.best_value},
             {"best_start", result.best_start},
             {"strategy", json::parse(to_json(result.best_strategy))},
             {"traces", traces}};
    return doc.dump(2);
}

std::string scenario_hash(const Scenario& sc) {
    std::string canonical = to_json(sc);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canonical) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

std::string report_csv_header() {
    return "schema,scenario_hash,e_w,e_w2,e_y,gamma,f_bar,aoii_bar,p_me";
}

std::string report_csv_row(const Scenario& sc, const AnalysisReport& report) {
    std::ostringstream os;
    os.precision(12);
    os << "report/1," << scenario_hash(sc) << ',' << report.mean_wed << ',' << report.second_wed
       << ',' << report.mean_ced << ',' << report.gamma << ',' << report.avg_penalty << ','
       << report.avg_aoii << ',' << report.mep;
    return os.str();
}

std::string curves_csv_header() {
    return "schema,uq_bar,class,objective_value,mep,starts,total_evals,best_start,converged,status";
}

std::string curves_csv_row(const SweepCell& cell) {
    std::ostringstream os;
    os.precision(12);
    os << "curves/1," << cell.uqbar << ',' << cell.strategy_class << ',';
    if (cell.failed) {
        std::string reason = cell.error;
        for (char& c : reason)
            if (c == ',' || c == '\n') c = ';';
        os << ",,,,,," << "failed:" << reason;
    } else {
        os << cell.objective_value << ',' << cell.mep << ',' << cell.starts << ','
           << cell.total_evaluations << ',' << cell.best_start << ',' << (cell.converged ? 1 : 0)
           << ",ok";
    }
    return os.str();
}

std::string trace_csv_header() { return "slot,device,x,x_hat,b,transmitted,decoded,lambda"; }

} // namespace ehaloha
