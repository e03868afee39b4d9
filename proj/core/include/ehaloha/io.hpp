#pragma once

#include <string>

#include "ehaloha/analysis.hpp"
#include "ehaloha/optimizer.hpp"
#include "ehaloha/penalty.hpp"
#include "ehaloha/scenario.hpp"
#include "ehaloha/simulator.hpp"
#include "ehaloha/strategy.hpp"

namespace ehaloha {

/// Thrown on malformed input documents; `field` names the offending entry.
class ParseError : public std::runtime_error {
  public:
    ParseError(std::string field_, const std::string& message)
        : std::runtime_error(field_ + ": " + message), field(std::move(field_)) {}
    std::string field;
};

std::string to_json(const Scenario& sc);
Scenario scenario_from_json(const std::string& text);

std::string to_json(const Strategy& st);
Strategy strategy_from_json(const std::string& text);

std::string to_json(const AnalysisReport& report);
std::string to_json(const SimStats& stats);
std::string to_json(const OptResult& result);

/// Stable 64-bit FNV-1a hash of a canonical serialization, hex-encoded.
std::string scenario_hash(const Scenario& sc);

/// CSV rows (fixed, versioned column orders; see README).
std::string report_csv_header();
std::string report_csv_row(const Scenario& sc, const AnalysisReport& report);
std::string curves_csv_header();
std::string curves_csv_row(const SweepCell& cell);
std::string trace_csv_header();

} // namespace ehaloha
