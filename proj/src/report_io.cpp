#include "ranlstm/report_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace ranlstm {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string fmt_opt9(const std::optional<double>& v) { return v ? fmt9(*v) : std::string{}; }

json eval_to_json(const EvalReport& r) {
    json j;
    j["arch"] = r.arch;
    j["param_count"] = r.param_count;
    j["mae"] = r.mae;
    j["rmse"] = r.rmse;
    j["mape_percent"] = r.mape_percent;
    j["r2_overall"] = r.r2_overall;
    j["r2_regular"] = r.r2_regular ? json(*r.r2_regular) : json(nullptr);
    j["r2_critical"] = r.r2_critical ? json(*r.r2_critical) : json(nullptr);
    j["efficiency"] = r.efficiency;
    j["n_regular"] = r.n_regular;
    j["n_critical"] = r.n_critical;
    return j;
}

EvalReport eval_from_json(const json& j) {
    EvalReport r;
    r.arch = j.at("arch").get<std::string>();
    r.param_count = j.at("param_count").get<std::int64_t>();
    r.mae = j.at("mae").get<double>();
    r.rmse = j.at("rmse").get<double>();
    r.mape_percent = j.at("mape_percent").get<double>();
    r.r2_overall = j.at("r2_overall").get<double>();
    if (!j.at("r2_regular").is_null()) r.r2_regular = j.at("r2_regular").get<double>();
    if (!j.at("r2_critical").is_null()) r.r2_critical = j.at("r2_critical").get<double>();
    r.efficiency = j.at("efficiency").get<double>();
    r.n_regular = j.at("n_regular").get<int>();
    r.n_critical = j.at("n_critical").get<int>();
    return r;
}

json candidate_to_json(const CandidateResult& r, bool with_wall_times) {
    json j;
    j["name"] = r.spec.name;
    j["hidden_dims"] = r.spec.hidden_dims;
    j["d_x"] = r.spec.d_x;
    j["window_len"] = r.spec.window_len;
    j["trained_dims"] = r.trained_dims;
    j["report"] = eval_to_json(r.report);
    j["c_lstm"] = r.c_lstm;
    j["c_norm"] = r.c_norm;
    j["efficiency"] = r.efficiency;
    j["failed"] = r.failed;
    j["failure_reason"] = r.failure_reason;
    if (with_wall_times) j["wall_time_s"] = r.wall_time_s;
    return j;
}

CandidateResult candidate_from_json(const json& j) {
    CandidateResult r;
    r.spec.name = j.at("name").get<std::string>();
    r.spec.hidden_dims = j.at("hidden_dims").get<std::vector<int>>();
    r.spec.d_x = j.at("d_x").get<int>();
    r.spec.window_len = j.at("window_len").get<int>();
    r.trained_dims = j.at("trained_dims").get<std::vector<int>>();
    r.report = eval_from_json(j.at("report"));
    r.c_lstm = j.at("c_lstm").get<std::int64_t>();
    r.c_norm = j.at("c_norm").get<double>();
    r.efficiency = j.at("efficiency").get<double>();
    r.failed = j.at("failed").get<bool>();
    r.failure_reason = j.at("failure_reason").get<std::string>();
    return r;
}

SearchOutcome search_from_json(const json& j) {
    SearchOutcome o;
    for (const json& c : j.at("ranked")) o.ranked.push_back(candidate_from_json(c));
    o.selected_default = j.at("selected_default").get<std::string>();
    o.selected_critical = j.at("selected_critical").get<std::string>();
    o.default_met_threshold = j.at("default_met_threshold").get<bool>();
    o.seed = j.at("seed").get<std::uint64_t>();
    o.dataset_fingerprint = j.at("dataset_fingerprint").get<std::uint64_t>();
    return o;
}

}  // namespace

json search_outcome_to_json(const SearchOutcome& outcome, bool with_wall_times) {
    json j;
    json ranked = json::array();
    for (const CandidateResult& r : outcome.ranked)
        ranked.push_back(candidate_to_json(r, with_wall_times));
    j["ranked"] = std::move(ranked);
    j["selected_default"] = outcome.selected_default;
    j["selected_critical"] = outcome.selected_critical;
    j["default_met_threshold"] = outcome.default_met_threshold;
    j["seed"] = outcome.seed;
    j["dataset_fingerprint"] = outcome.dataset_fingerprint;
    return j;
}

json report_to_json(const SimulationReport& report) {
    json j;
    j["mode"] = report.mode;
    j["scenario_echo"] = echo_scenario(report.scenario);
    j["resolved"] = {{"regular_model", report.regular_model},
                     {"critical_model", report.critical_model}};
    j["search"] = search_outcome_to_json(report.search, false);

    json refreshes = json::array();
    for (const RefreshRecord& r : report.refreshes) {
        refreshes.push_back({{"trigger_t", r.trigger_t},
                             {"publish_t", r.publish_t},
                             {"applied", r.applied},
                             {"selected_default", r.selected_default},
                             {"selected_critical", r.selected_critical},
                             {"default_met_threshold", r.default_met_threshold}});
    }
    j["refreshes"] = std::move(refreshes);

    json predictions = json::array();
    for (const PredictionRow& r : report.predictions) {
        predictions.push_back({{"t", r.t},
                               {"predicted", r.predicted},
                               {"actual", r.actual},
                               {"model", r.model},
                               {"version", r.version},
                               {"param_cost", r.param_cost},
                               {"regime", to_string(r.regime)}});
    }
    j["predictions"] = std::move(predictions);

    json decisions = json::array();
    for (const OrchestrationDecision& d : report.decisions) {
        decisions.push_back({{"t", d.t},
                             {"regime", to_string(d.regime)},
                             {"model", d.chosen_model},
                             {"switched", d.switched},
                             {"reason", to_string(d.reason)},
                             {"param_cost", d.param_cost},
                             {"fallback", d.fallback}});
    }
    j["decisions"] = std::move(decisions);

    j["online"] = eval_to_json(report.online);
    j["mean_param_cost"] = report.mean_param_cost;
    j["reductions"] = {{"baseline_model", report.scenario.baseline_model},
                       {"vs_deep", report.reduction_vs_deep},
                       {"vs_ultra", report.reduction_vs_ultra},
                       {"vs_baseline", report.reduction_vs_baseline}};
    j["switch_count"] = report.switch_count;
    j["coverage"] = {{"critical_steps", report.critical_steps},
                     {"critical_served_by_critical", report.critical_served_by_critical},
                     {"regular_steps", report.regular_steps},
                     {"regular_served_by_regular", report.regular_served_by_regular}};
    return j;
}

SimulationReport report_from_json(const json& j) {
    try {
        SimulationReport rep;
        rep.mode = j.at("mode").get<std::string>();
        rep.scenario =
            parse_scenario_text(j.at("scenario_echo").get<std::string>(), "scenario_echo");
        rep.regular_model = j.at("resolved").at("regular_model").get<std::string>();
        rep.critical_model = j.at("resolved").at("critical_model").get<std::string>();
        rep.search = search_from_json(j.at("search"));
        for (const json& r : j.at("refreshes")) {
            RefreshRecord rec;
            rec.trigger_t = r.at("trigger_t").get<int>();
            rec.publish_t = r.at("publish_t").get<int>();
            rec.applied = r.at("applied").get<bool>();
            rec.selected_default = r.at("selected_default").get<std::string>();
            rec.selected_critical = r.at("selected_critical").get<std::string>();
            rec.default_met_threshold = r.at("default_met_threshold").get<bool>();
            rep.refreshes.push_back(std::move(rec));
        }
        for (const json& r : j.at("predictions")) {
            PredictionRow row;
            row.t = r.at("t").get<int>();
            row.predicted = r.at("predicted").get<double>();
            row.actual = r.at("actual").get<double>();
            row.model = r.at("model").get<std::string>();
            row.version = r.at("version").get<int>();
            row.param_cost = r.at("param_cost").get<std::int64_t>();
            row.regime = parse_regime(r.at("regime").get<std::string>());
            rep.predictions.push_back(std::move(row));
        }
        for (const json& r : j.at("decisions")) {
            OrchestrationDecision d;
            d.t = r.at("t").get<int>();
            d.regime = parse_regime(r.at("regime").get<std::string>());
            d.chosen_model = r.at("model").get<std::string>();
            d.switched = r.at("switched").get<bool>();
            d.reason = parse_reason(r.at("reason").get<std::string>());
            d.param_cost = r.at("param_cost").get<std::int64_t>();
            d.fallback = r.at("fallback").get<bool>();
            rep.decisions.push_back(std::move(d));
        }
        rep.online = eval_from_json(j.at("online"));
        rep.mean_param_cost = j.at("mean_param_cost").get<double>();
        rep.reduction_vs_deep = j.at("reductions").at("vs_deep").get<double>();
        rep.reduction_vs_ultra = j.at("reductions").at("vs_ultra").get<double>();
        rep.reduction_vs_baseline = j.at("reductions").at("vs_baseline").get<double>();
        rep.switch_count = j.at("switch_count").get<int>();
        const json& cov = j.at("coverage");
        rep.critical_steps = cov.at("critical_steps").get<int>();
        rep.critical_served_by_critical = cov.at("critical_served_by_critical").get<int>();
        rep.regular_steps = cov.at("regular_steps").get<int>();
        rep.regular_served_by_regular = cov.at("regular_served_by_regular").get<int>();
        return rep;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("report: ") + e.what());
    }
}

std::string render_table1_csv(const std::vector<CandidateResult>& ranked) {
    std::ostringstream out;
    out << "arch,params_eq1,params_table,mae,rmse,mape,r2_reg,r2_crit,r2_overall,efficiency\n";
    for (const CandidateResult& r : ranked) {
        const std::string& name = r.spec.name;
        out << name << (params_match_published(name) ? "" : "*") << ","
            << nominal_param_count(name) << "," << published_param_count(name) << ","
            << fmt9(r.report.mae) << "," << fmt9(r.report.rmse) << ","
            << fmt9(r.report.mape_percent) << "," << fmt_opt9(r.report.r2_regular) << ","
            << fmt_opt9(r.report.r2_critical) << "," << fmt9(r.report.r2_overall) << ","
            << fmt9(r.efficiency) << "\n";
    }
    return out.str();
}

std::string render_predictions_csv(const std::vector<PredictionRow>& rows) {
    std::ostringstream out;
    out << "t,predicted,actual,model,version,param_cost,regime\n";
    for (const PredictionRow& r : rows) {
        out << r.t << "," << fmt9(r.predicted) << "," << fmt9(r.actual) << "," << r.model
            << "," << r.version << "," << r.param_cost << "," << to_string(r.regime) << "\n";
    }
    return out.str();
}

std::string render_decisions_csv(const std::vector<OrchestrationDecision>& rows) {
    std::ostringstream out;
    out << "t,regime,model,switched,reason,param_cost\n";
    for (const OrchestrationDecision& d : rows) {
        out << d.t << "," << to_string(d.regime) << "," << d.chosen_model << ","
            << (d.switched ? 1 : 0) << "," << to_string(d.reason) << "," << d.param_cost
            << "\n";
    }
    return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    out.close();
    if (!out) {
        std::error_code ec;
        fs::remove(path, ec);  // drop the partial file
        throw std::runtime_error("write failed: " + path);
    }
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void emit_report(const SimulationReport& report, const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    std::vector<fs::path> written;
    const auto emit = [&](const std::string& name, const std::string& content) {
        const fs::path path = fs::path(dir) / name;
        write_text_file(path.string(), content);
        written.push_back(path);
    };
    try {
        emit("report.json", report_to_json(report).dump(2) + "\n");
        emit("predictions.csv", render_predictions_csv(report.predictions));
        emit("decisions.csv", render_decisions_csv(report.decisions));
        emit("table1.csv", render_table1_csv(report.search.ranked));
    } catch (...) {
        for (const fs::path& p : written) fs::remove(p, ec);
        throw;
    }
}

}  // namespace ranlstm
