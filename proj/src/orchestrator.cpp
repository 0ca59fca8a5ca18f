#include "ranlstm/orchestrator.hpp"

#include <algorithm>

#include "ranlstm/nas.hpp"

namespace ranlstm {

void PolicyConfig::validate() const {
    if (regular_model.empty()) throw ConfigError("regular_model: must not be empty");
    if (!(tau_lo < tau_hi))
        throw ConfigError("tau_lo (" + std::to_string(tau_lo) +
                          ") must be strictly below tau_hi (" + std::to_string(tau_hi) + ")");
    if (min_dwell < 1) throw ConfigError("min_dwell: must be at least 1");
    if (surprise_threshold <= 0.0) throw ConfigError("surprise_threshold: must be positive");
}

const char* to_string(DecisionReason r) {
    switch (r) {
        case DecisionReason::Init: return "init";
        case DecisionReason::LoadThreshold: return "load-threshold";
        case DecisionReason::PredictionSurprise: return "prediction-surprise";
        case DecisionReason::DwellHold: return "dwell-hold";
    }
    return "init";
}

DecisionReason parse_reason(const std::string& s) {
    if (s == "init") return DecisionReason::Init;
    if (s == "load-threshold") return DecisionReason::LoadThreshold;
    if (s == "prediction-surprise") return DecisionReason::PredictionSurprise;
    if (s == "dwell-hold") return DecisionReason::DwellHold;
    throw std::invalid_argument("unknown decision reason: " + s);
}

double smoothed_load(std::span<const double> recent) {
    if (recent.empty())
        throw std::invalid_argument("smoothed_load needs at least one load sample");
    double sum = 0.0;
    for (double v : recent) sum += v;
    return sum / static_cast<double>(recent.size());
}

RegimeDetector::RegimeDetector(const PolicyConfig& cfg) : cfg_(cfg) { cfg_.validate(); }

RegimeDetector::Step RegimeDetector::observe(double load, double abs_error) {
    recent_.push_back(load);
    if (recent_.size() > static_cast<std::size_t>(kSmoothWindow)) recent_.pop_front();
    const std::vector<double> window(recent_.begin(), recent_.end());
    const double smoothed = smoothed_load(window);

    if (regime_ == Regime::Regular) {
        if (smoothed > cfg_.tau_hi) {
            regime_ = Regime::Critical;
            dwell_ = 1;
            return {regime_, DecisionReason::LoadThreshold};
        }
        if (abs_error > cfg_.surprise_threshold) {
            regime_ = Regime::Critical;
            dwell_ = 1;
            return {regime_, DecisionReason::PredictionSurprise};
        }
        return {regime_, DecisionReason::LoadThreshold};
    }

    ++dwell_;
    if (smoothed < cfg_.tau_lo) {
        if (dwell_ >= cfg_.min_dwell) {
            regime_ = Regime::Regular;
            dwell_ = 0;
            return {regime_, DecisionReason::LoadThreshold};
        }
        return {regime_, DecisionReason::DwellHold};  // only the dwell keeps us Critical
    }
    return {regime_, DecisionReason::LoadThreshold};
}

OrchestrationDecision select_model(Regime regime, const PolicyConfig& policy,
                                   const ModelRegistry& registry,
                                   const std::map<std::string, double>& critical_scores,
                                   const std::string& previous_choice, int t,
                                   DecisionReason reason) {
    const std::vector<std::string> available = registry.names();
    if (available.empty()) throw std::runtime_error("select_model: registry is empty");

    std::string wanted = policy.regular_model;
    if (regime == Regime::Critical && !policy.critical_model.empty())
        wanted = policy.critical_model;

    OrchestrationDecision decision;
    decision.t = t;
    decision.regime = regime;
    decision.reason = reason;

    if (!registry.has(wanted)) {
        // fall back to the best critical scorer among what is present
        decision.fallback = true;
        const std::string* best = nullptr;
        double best_score = 0.0;
        for (const std::string& name : available) {
            const auto it = critical_scores.find(name);
            const double score = it != critical_scores.end() ? it->second : -1e300;
            if (best == nullptr || score > best_score) {
                best = &name;
                best_score = score;
            }
        }
        wanted = *best;
    }

    decision.chosen_model = wanted;
    decision.param_cost = registry.latency_proxy_of(wanted);
    decision.switched = !previous_choice.empty() && previous_choice != wanted;
    return decision;
}

double complexity_reduction(double mean_param_cost, const std::string& baseline) {
    const std::int64_t base = nominal_param_count(baseline);  // validates the name
    return 100.0 * (1.0 - mean_param_cost / static_cast<double>(base));
}

double complexity_reduction(std::span<const OrchestrationDecision> log,
                            const std::string& baseline) {
    if (log.empty())
        throw std::invalid_argument("complexity_reduction needs a non-empty decision log");
    double sum = 0.0;
    for (const OrchestrationDecision& d : log) sum += static_cast<double>(d.param_cost);
    return complexity_reduction(sum / static_cast<double>(log.size()), baseline);
}

}  // namespace ranlstm
