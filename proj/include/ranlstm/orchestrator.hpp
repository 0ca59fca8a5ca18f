#pragma once

// Regime detection with hysteresis and the model-selection policy: smoothed
// load above tau_hi or a prediction surprise escalates to Critical, and the
// detector only de-escalates once the smoothed load is below tau_lo and a
// minimum dwell time has passed.

#include <deque>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "ranlstm/registry.hpp"
#include "ranlstm/types.hpp"

namespace ranlstm {

struct PolicyConfig {
    std::string regular_model{"Balanced-Medium"};
    std::string critical_model;      // empty: take the search's critical choice
    double tau_hi{0.75};
    double tau_lo{0.60};
    int min_dwell{30};               // steps to stay Critical before de-escalation
    double surprise_threshold{0.10}; // absolute prediction error triggering escalation

    void validate() const;           // ConfigError citing the offending keys
};

enum class DecisionReason { Init, LoadThreshold, PredictionSurprise, DwellHold };

const char* to_string(DecisionReason r);
DecisionReason parse_reason(const std::string& s);

struct OrchestrationDecision {
    int t{};
    Regime regime{Regime::Regular};
    std::string chosen_model;
    bool switched{};
    DecisionReason reason{DecisionReason::Init};
    std::int64_t param_cost{};
    bool fallback{};  // set when the configured model was absent
};

inline constexpr int kSmoothWindow = 5;

/// Mean of the most recent loads; throws std::invalid_argument on empty input.
double smoothed_load(std::span<const double> recent);

class RegimeDetector {
public:
    explicit RegimeDetector(const PolicyConfig& cfg);

    struct Step {
        Regime regime;
        DecisionReason reason;
    };

    /// Feed one observed load and the absolute prediction error of the same
    /// step; returns the regime this step belongs to.
    Step observe(double load, double abs_error);

    Regime regime() const { return regime_; }
    int dwell() const { return dwell_; }

private:
    PolicyConfig cfg_;
    std::deque<double> recent_;
    Regime regime_{Regime::Regular};
    int dwell_{0};
};

/// Picks the policy's model for the regime. When the configured name is not
/// in the registry, falls back to the best available critical score (the
/// decision is flagged). Throws std::runtime_error when the registry is
/// empty.
OrchestrationDecision select_model(Regime regime, const PolicyConfig& policy,
                                   const ModelRegistry& registry,
                                   const std::map<std::string, double>& critical_scores,
                                   const std::string& previous_choice, int t,
                                   DecisionReason reason);

/// 100 * (1 - mean(param_cost) / baseline parameter count); the baseline is
/// named and must be a search-space architecture. Throws ConfigError for
/// unknown baselines, std::invalid_argument for an empty log.
double complexity_reduction(std::span<const OrchestrationDecision> log,
                            const std::string& baseline);

/// Same reduction from a pre-computed mean cost.
double complexity_reduction(double mean_param_cost, const std::string& baseline);

}  // namespace ranlstm
