#include "ranlstm/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "ranlstm/registry.hpp"
#include "ranlstm/rng.hpp"

namespace ranlstm {

namespace {

bool in_candidate_space(const std::string& name) {
    for (const ArchSpec& s : candidate_space()) {
        if (s.name == name) return true;
    }
    return false;
}

std::map<std::string, double> critical_scores_of(const SearchOutcome& outcome) {
    std::map<std::string, double> scores;
    for (const CandidateResult& r : outcome.ranked) {
        if (r.failed) continue;
        scores[r.spec.name] = r.report.r2_critical.value_or(r.report.r2_overall);
    }
    return scores;
}

void publish_all(ModelRegistry& registry, const SearchOutcome& outcome) {
    for (const auto& [name, model] : outcome.models) registry.publish(model);
}

struct PendingRefresh {
    int publish_t{};
    SearchOutcome outcome;
    std::size_t record_index{};  // into SimulationReport::refreshes
};

SimulationReport simulate(const ScenarioConfig& cfg, const std::string& forced) {
    cfg.validate();
    if (!forced.empty() && !in_candidate_space(forced))
        throw ConfigError("forced model '" + forced + "' is not in the candidate space");

    TraceConfig trace_cfg = cfg.trace;
    trace_cfg.duration_steps = cfg.duration_steps;
    const TraceSeries trace = generate_trace(trace_cfg, cfg.trace_seed);
    const WindowedDataset full = window_dataset(trace, cfg.window_len, 16);

    const int warmup = cfg.warmup_steps();
    const int duration = cfg.duration_steps;
    const int W = cfg.window_len;

    SimulationReport rep;
    rep.scenario = cfg;
    rep.mode = forced.empty() ? std::string{"adaptive"} : forced;

    SearchConfig search_cfg;
    search_cfg.train = cfg.train;
    search_cfg.train.seed = cfg.train_seed;
    search_cfg.train.workers = cfg.workers;
    search_cfg.default_threshold = cfg.default_threshold;
    search_cfg.seed = cfg.search_seed;

    // phase 1: initial search on windows whose target lies inside the warmup
    rep.search = run_search(dataset_slice(full, 0, warmup - W), search_cfg, cfg.scale);

    ModelRegistry registry;
    publish_all(registry, rep.search);
    std::map<std::string, double> critical_scores = critical_scores_of(rep.search);

    PolicyConfig policy = cfg.policy;
    if (policy.critical_model.empty()) policy.critical_model = rep.search.selected_critical;
    rep.regular_model = policy.regular_model;
    rep.critical_model = policy.critical_model;

    // initial activation; not logged, the first logged decision is the Init row
    std::string current;
    if (forced.empty()) {
        OrchestrationDecision initial =
            select_model(Regime::Regular, policy, registry, critical_scores, "", warmup,
                         DecisionReason::Init);
        current = initial.chosen_model;
    } else {
        current = forced;
    }
    registry.activate(current);

    RegimeDetector detector(policy);
    std::optional<PendingRefresh> pending;
    rep.predictions.reserve(static_cast<std::size_t>(duration - warmup));
    rep.decisions.reserve(static_cast<std::size_t>(duration - warmup));

    // phase 2: one prediction and one decision per online step
    for (int t = warmup; t < duration; ++t) {
        if (pending && pending->publish_t == t) {
            publish_all(registry, pending->outcome);
            critical_scores = critical_scores_of(pending->outcome);
            registry.activate(current);  // pick up the refreshed weights
            rep.refreshes[pending->record_index].applied = true;
            pending.reset();
        }
        if (!pending && t > warmup && (t - warmup) % cfg.rapp_period == 0) {
            const int first = std::max(0, t - cfg.rapp_history_steps - W);
            const int count = (t - W) - first;
            SearchConfig refresh_cfg = search_cfg;
            refresh_cfg.train.epochs = cfg.refresh_epochs;
            refresh_cfg.seed = derive_seed(cfg.search_seed, static_cast<std::uint64_t>(t));
            refresh_cfg.train.seed =
                derive_seed(cfg.train_seed, static_cast<std::uint64_t>(t));
            PendingRefresh job;
            job.outcome = run_search(dataset_slice(full, first, count), refresh_cfg, cfg.scale);
            job.publish_t = t + std::max(1, cfg.rapp_delay_steps);
            job.record_index = rep.refreshes.size();
            RefreshRecord rec;
            rec.trigger_t = t;
            rec.publish_t = job.publish_t;
            rec.selected_default = job.outcome.selected_default;
            rec.selected_critical = job.outcome.selected_critical;
            rec.default_met_threshold = job.outcome.default_met_threshold;
            rep.refreshes.push_back(rec);
            pending = std::move(job);
        }

        const auto active = registry.model(registry.active_name());
        const WindowView window = full.window(t - W, active->spec().d_x);
        const PredictionRecord pred = registry.predict(window, t);
        const TraceSample& sample = trace.samples[static_cast<std::size_t>(t)];

        PredictionRow row;
        row.t = t;
        row.predicted = pred.predicted_load;
        row.actual = sample.load;
        row.model = pred.model_name;
        row.version = pred.model_version;
        row.param_cost = pred.latency_proxy;
        row.regime = sample.is_critical_event ? Regime::Critical : Regime::Regular;
        rep.predictions.push_back(row);

        const double abs_error = std::abs(pred.predicted_load - sample.load);
        const RegimeDetector::Step step = detector.observe(sample.load, abs_error);
        const DecisionReason reason = t == warmup ? DecisionReason::Init : step.reason;

        OrchestrationDecision decision;
        if (forced.empty()) {
            decision = select_model(step.regime, policy, registry, critical_scores, current,
                                    t, reason);
            if (decision.chosen_model != current) {
                registry.activate(decision.chosen_model);  // takes effect next step
                current = decision.chosen_model;
            }
        } else {
            decision.t = t;
            decision.regime = step.regime;
            decision.chosen_model = forced;
            decision.switched = false;
            decision.reason = reason;
            decision.param_cost = registry.latency_proxy_of(forced);
        }
        rep.decisions.push_back(decision);
        if (decision.switched) ++rep.switch_count;
    }

    std::vector<double> predicted, actual;
    std::vector<Regime> labels;
    predicted.reserve(rep.predictions.size());
    actual.reserve(rep.predictions.size());
    labels.reserve(rep.predictions.size());
    for (const PredictionRow& row : rep.predictions) {
        predicted.push_back(row.predicted);
        actual.push_back(row.actual);
        labels.push_back(row.regime);
        const bool critical = row.regime == Regime::Critical;
        (critical ? rep.critical_steps : rep.regular_steps) += 1;
        if (critical && row.model == rep.critical_model) ++rep.critical_served_by_critical;
        if (!critical && row.model == rep.regular_model) ++rep.regular_served_by_regular;
    }
    rep.online = evaluate_predictions(predicted, actual, labels);
    rep.online.arch = rep.mode;

    double cost_sum = 0.0;
    for (const OrchestrationDecision& d : rep.decisions)
        cost_sum += static_cast<double>(d.param_cost);
    rep.mean_param_cost = cost_sum / static_cast<double>(rep.decisions.size());
    rep.reduction_vs_deep = complexity_reduction(rep.mean_param_cost, "Deep-Performance");
    rep.reduction_vs_ultra = complexity_reduction(rep.mean_param_cost, "Ultra-Performance");
    rep.reduction_vs_baseline = complexity_reduction(rep.mean_param_cost, cfg.baseline_model);
    return rep;
}

}  // namespace

SimulationReport run_simulation(const ScenarioConfig& cfg) { return simulate(cfg, ""); }

SimulationReport replay_counterfactual(const ScenarioConfig& cfg, const std::string& forced) {
    if (forced.empty()) throw ConfigError("counterfactual requires a model name to pin");
    return simulate(cfg, forced);
}

}  // namespace ranlstm
