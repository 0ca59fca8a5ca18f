#pragma once

// Closed-loop simulation: an initial architecture search on the warmup split,
// then step-by-step replay of the online segment (predict, observe, detect,
// select/activate), with periodic background re-searches whose results take
// effect only after a fixed simulated delay. Also the static-baseline replay
// used for complexity-reduction comparisons.

#include <cstdint>
#include <string>
#include <vector>

#include "ranlstm/metrics.hpp"
#include "ranlstm/nas.hpp"
#include "ranlstm/orchestrator.hpp"
#include "ranlstm/scenario.hpp"

namespace ranlstm {

/// One background re-search. Triggered synchronously in simulated time; its
/// publications land at the start of step publish_t (trigger_t + delay), or
/// never when the run ends first (applied stays false).
struct RefreshRecord {
    int trigger_t{};
    int publish_t{};
    bool applied{};
    std::string selected_default;
    std::string selected_critical;
    bool default_met_threshold{};
};

struct PredictionRow {
    int t{};
    double predicted{};
    double actual{};
    std::string model;
    int version{};
    std::int64_t param_cost{};
    Regime regime{Regime::Regular};  // ground-truth label of step t
};

struct SimulationReport {
    ScenarioConfig scenario;
    /// Either "adaptive" or the pinned model name of a counterfactual run.
    std::string mode;
    std::string regular_model;   // resolved policy names
    std::string critical_model;

    SearchOutcome search;        // initial warmup search (models retained)
    std::vector<RefreshRecord> refreshes;

    /// One row per online step, covering exactly [warmup, duration).
    /// decisions[i] is the choice made after observing predictions[i].
    std::vector<PredictionRow> predictions;
    std::vector<OrchestrationDecision> decisions;

    EvalReport online;           // metrics over the prediction log
    double mean_param_cost{};
    double reduction_vs_deep{};
    double reduction_vs_ultra{};
    double reduction_vs_baseline{};
    int switch_count{};

    // serving coverage against ground-truth regime labels
    int critical_steps{};
    int critical_served_by_critical{};
    int regular_steps{};
    int regular_served_by_regular{};
};

/// Full adaptive run. Deterministic per (cfg seeds, scale); throws ConfigError
/// for invalid cfg and propagates training failures.
SimulationReport run_simulation(const ScenarioConfig& cfg);

/// Identical loop with the orchestrator bypassed: `forced` serves every step
/// while regime detection and re-searches still run. The name is validated
/// against the candidate space before any work happens.
SimulationReport replay_counterfactual(const ScenarioConfig& cfg, const std::string& forced);

}  // namespace ranlstm
