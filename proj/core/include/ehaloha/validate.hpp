#pragma once

#include <string>
#include <vector>

#include "ehaloha/penalty.hpp"
#include "ehaloha/scenario.hpp"
#include "ehaloha/strategy.hpp"

namespace ehaloha {

struct ValidationIssue {
    std::string field;
    std::string message;
};

std::vector<ValidationIssue> validate(const Scenario& sc);
std::vector<ValidationIssue> validate(const Strategy& st);
std::vector<ValidationIssue> validate(const PenaltySpec& spec);
std::vector<ValidationIssue> validate(const Scenario& sc, const Strategy& st);

/// Throws std::invalid_argument listing every violation.
void require_valid(const Scenario& sc);
void require_valid(const Scenario& sc, const Strategy& st);
void require_valid(const PenaltySpec& spec);

std::string format_issues(const std::vector<ValidationIssue>& issues);

} // namespace ehaloha
