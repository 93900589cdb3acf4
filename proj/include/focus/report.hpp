#pragma once

#include <ostream>
#include <vector>

#include <json.hpp>

#include "focus/evaluation.hpp"

namespace focus {

// Report schema "focus-eval-report" v1; see docs/report-schema.md.
nlohmann::json to_json(const EvalReport& report);

// One line per (project, k, N) row.
void write_csv(std::ostream& out, const EvalReport& report);

std::vector<EvalRow> rows_from_json(const nlohmann::json& report);

}  // namespace focus
