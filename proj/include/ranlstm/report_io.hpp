#pragma once

// Serialization of simulation results: the JSON report plus the three CSV
// views (predictions, decisions, accuracy table). Formatting is deterministic
// so identical runs produce byte-identical files, and the JSON report alone
// carries everything needed to re-render the CSVs.

#include <string>

#include "json.hpp"
#include "ranlstm/simulation.hpp"

namespace ranlstm {

/// Deterministic JSON form of a report: keys sorted, doubles printed
/// shortest-round-trip, per-candidate wall times omitted, trained models not
/// serialized.
nlohmann::json report_to_json(const SimulationReport& report);

/// Inverse of report_to_json up to the omitted fields (wall times zero,
/// models empty). Throws ConfigError on missing or mistyped fields.
SimulationReport report_from_json(const nlohmann::json& j);

/// CandidateResult rows in ranked order; arch names of rows whose published
/// count disagrees with the recurrence-formula count carry a trailing '*'.
/// Header: arch,params_eq1,params_table,mae,rmse,mape,r2_reg,r2_crit,
/// r2_overall,efficiency
std::string render_table1_csv(const std::vector<CandidateResult>& ranked);

/// Header: t,predicted,actual,model,version,param_cost,regime
std::string render_predictions_csv(const std::vector<PredictionRow>& rows);

/// Header: t,regime,model,switched,reason,param_cost
std::string render_decisions_csv(const std::vector<OrchestrationDecision>& rows);

/// Search outcome with wall times, for a standalone search run.
nlohmann::json search_outcome_to_json(const SearchOutcome& outcome, bool with_wall_times);

/// Writes report.json, predictions.csv, decisions.csv and table1.csv into
/// dir (created if missing). On any write failure the files this call
/// created are removed and std::runtime_error is thrown.
void emit_report(const SimulationReport& report, const std::string& dir);

/// Whole-file helpers; write_text_file throws std::runtime_error on failure.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace ranlstm
