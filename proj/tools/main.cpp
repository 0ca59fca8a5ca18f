// Command-line driver: trace generation, single-model training, architecture
// search, the closed-loop simulation and its static counterfactual, gradient
// checking, and re-rendering reports from a prior run.
//
// Exit codes: 0 success, 2 configuration error, 3 runtime failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"
#include "ranlstm/checkpoint.hpp"
#include "ranlstm/report_io.hpp"
#include "ranlstm/rng.hpp"
#include "ranlstm/simulation.hpp"

namespace fs = std::filesystem;
using namespace ranlstm;

namespace {

struct CliOptions {
    std::string scenario_path;
    std::string out_dir;
    std::string arch;
    std::string baseline;
    std::optional<std::uint64_t> seed;
    std::optional<double> scale;
};

ScenarioConfig load_scenario(const CliOptions& opt) {
    ScenarioConfig cfg = opt.scenario_path.empty()
                             ? parse_scenario_text("", "<defaults>")
                             : parse_scenario(opt.scenario_path);
    if (opt.seed) {
        cfg.trace_seed = *opt.seed;
        cfg.train_seed = *opt.seed;
        cfg.search_seed = *opt.seed;
    }
    if (opt.scale) cfg.scale = *opt.scale;
    if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
    if (!opt.baseline.empty()) cfg.baseline_model = opt.baseline;
    cfg.train.seed = cfg.train_seed;
    cfg.train.workers = cfg.workers;
    cfg.validate();
    return cfg;
}

void write_echo(const ScenarioConfig& cfg) {
    std::error_code ec;
    fs::create_directories(cfg.out_dir, ec);
    write_text_file((fs::path(cfg.out_dir) / "scenario_echo.cfg").string(),
                    echo_scenario(cfg));
}

TraceSeries make_trace(const ScenarioConfig& cfg) {
    TraceConfig tc = cfg.trace;
    tc.duration_steps = cfg.duration_steps;
    return generate_trace(tc, cfg.trace_seed);
}

WindowedDataset warmup_windows(const ScenarioConfig& cfg, const TraceSeries& trace) {
    const WindowedDataset full = window_dataset(trace, cfg.window_len, 16);
    return dataset_slice(full, 0, cfg.warmup_steps() - cfg.window_len);
}

SearchConfig make_search_config(const ScenarioConfig& cfg) {
    SearchConfig scfg;
    scfg.train = cfg.train;
    scfg.default_threshold = cfg.default_threshold;
    scfg.seed = cfg.search_seed;
    return scfg;
}

int cmd_generate(const CliOptions& opt) {
    const ScenarioConfig cfg = load_scenario(opt);
    const TraceSeries trace = make_trace(cfg);
    write_echo(cfg);
    const std::string path = (fs::path(cfg.out_dir) / "trace.csv").string();
    write_trace_csv(trace, path);
    std::cout << "wrote " << trace.size() << " steps to " << path << "\n";
    return 0;
}

int cmd_train(const CliOptions& opt) {
    const ScenarioConfig cfg = load_scenario(opt);
    if (opt.arch.empty()) throw ConfigError("train requires --arch");
    ArchSpec spec;
    bool found = false;
    for (const ArchSpec& s : candidate_space(cfg.window_len)) {
        if (s.name == opt.arch) {
            spec = s;
            found = true;
        }
    }
    if (!found) throw ConfigError("unknown architecture '" + opt.arch + "'");

    const TraceSeries trace = make_trace(cfg);
    const WindowedDataset warmup = warmup_windows(cfg, trace);
    const int holdout = std::max(1, warmup.size() / 5);
    const WindowedDataset train_ds = dataset_slice(warmup, 0, warmup.size() - holdout);
    const WindowedDataset holdout_ds =
        dataset_slice(warmup, warmup.size() - holdout, holdout);

    ArchSpec trained = spec;
    trained.hidden_dims = scale_dims(spec.hidden_dims, cfg.scale);
    LstmModel model = init_model(trained, cfg.train_seed);
    const TrainHistory history = train(model, train_ds, cfg.train);
    EvalReport report = evaluate(model, holdout_ds);
    report.arch = spec.name;
    report.param_count = nominal_param_count(spec.name);

    write_echo(cfg);
    const std::string ckpt = (fs::path(cfg.out_dir) / (spec.name + ".ckpt")).string();
    save_checkpoint(model, ckpt);
    std::cout << spec.name << ": train loss " << history.initial_train_loss << " -> "
              << history.train_loss.back() << ", holdout r2 " << report.r2_overall
              << ", saved " << ckpt << "\n";
    return 0;
}

int cmd_search(const CliOptions& opt) {
    const ScenarioConfig cfg = load_scenario(opt);
    const TraceSeries trace = make_trace(cfg);
    const SearchOutcome outcome =
        run_search(warmup_windows(cfg, trace), make_search_config(cfg), cfg.scale);
    write_echo(cfg);
    write_text_file((fs::path(cfg.out_dir) / "search_outcome.json").string(),
                    search_outcome_to_json(outcome, true).dump(2) + "\n");
    write_text_file((fs::path(cfg.out_dir) / "table1.csv").string(),
                    render_table1_csv(outcome.ranked));
    std::cout << "selected default " << outcome.selected_default << ", critical "
              << outcome.selected_critical << "\n";
    return 0;
}

int run_and_emit(const ScenarioConfig& cfg, const std::string& forced) {
    const SimulationReport rep =
        forced.empty() ? run_simulation(cfg) : replay_counterfactual(cfg, forced);
    write_echo(cfg);
    emit_report(rep, cfg.out_dir);
    std::printf("%s: %zu online steps, switches %d, mean cost %.1f, "
                "reduction vs Deep %.2f%% / Ultra %.2f%%, online r2 %.4f\n",
                rep.mode.c_str(), rep.predictions.size(), rep.switch_count,
                rep.mean_param_cost, rep.reduction_vs_deep, rep.reduction_vs_ultra,
                rep.online.r2_overall);
    return 0;
}

int cmd_simulate(const CliOptions& opt) { return run_and_emit(load_scenario(opt), ""); }

int cmd_counterfactual(const CliOptions& opt) {
    const ScenarioConfig cfg = load_scenario(opt);
    if (cfg.baseline_model.empty()) throw ConfigError("counterfactual requires --baseline");
    return run_and_emit(cfg, cfg.baseline_model);
}

int cmd_gradcheck(const CliOptions& opt) {
    const double scale = opt.scale.value_or(0.125);
    const std::uint64_t seed = opt.seed.value_or(1);
    bool ok = true;
    for (const ArchSpec& spec : candidate_space()) {
        ArchSpec small = spec;
        small.hidden_dims = scale_dims(spec.hidden_dims, scale);
        LstmModel model = init_model(small, derive_seed(seed, 1));
        Rng rng(derive_seed(seed, 2));
        std::vector<double> window(static_cast<std::size_t>(small.window_len) *
                                   static_cast<std::size_t>(small.d_x));
        for (double& v : window) v = rng.uniform();
        const WindowView view{window.data(), small.window_len, small.d_x, small.d_x};
        const GradCheckResult res =
            grad_check(model, view, 0.5, 1e-5, 4000, derive_seed(seed, 3));
        const bool pass = res.max_rel_error < 1e-4;
        ok = ok && pass;
        std::printf("%-18s dims", spec.name.c_str());
        for (int d : small.hidden_dims) std::printf(" %d", d);
        std::printf(": checked %zu, max rel err %.3g %s\n", res.checked, res.max_rel_error,
                    pass ? "ok" : "FAIL");
    }
    if (!ok) throw std::runtime_error("gradient check failed");
    return 0;
}

int cmd_report(const CliOptions& opt) {
    const std::string dir = opt.out_dir.empty() ? "out" : opt.out_dir;
    const std::string path = (fs::path(dir) / "report.json").string();
    const nlohmann::json j = nlohmann::json::parse(read_text_file(path));
    const SimulationReport rep = report_from_json(j);
    write_text_file(path, j.dump(2) + "\n");
    write_text_file((fs::path(dir) / "predictions.csv").string(),
                    render_predictions_csv(rep.predictions));
    write_text_file((fs::path(dir) / "decisions.csv").string(),
                    render_decisions_csv(rep.decisions));
    write_text_file((fs::path(dir) / "table1.csv").string(),
                    render_table1_csv(rep.search.ranked));
    std::cout << "re-rendered " << dir << " from " << path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Adaptive LSTM orchestration simulator for RAN traffic prediction"};
    app.require_subcommand(1);
    CliOptions opt;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--scenario", opt.scenario_path, "scenario file (defaults when omitted)");
        sub->add_option("--out", opt.out_dir, "output directory");
        sub->add_option("--seed", opt.seed, "override every seed in the scenario");
        sub->add_option("--scale", opt.scale, "hidden-dim scale factor in (0, 1]");
    };

    CLI::App* generate = app.add_subcommand("generate", "write the synthetic trace as CSV");
    add_common(generate);
    CLI::App* train_cmd = app.add_subcommand("train", "train one architecture, save a checkpoint");
    add_common(train_cmd);
    train_cmd->add_option("--arch", opt.arch, "candidate architecture name")->required();
    CLI::App* search = app.add_subcommand("search", "run the architecture search");
    add_common(search);
    CLI::App* simulate = app.add_subcommand("simulate", "run the adaptive closed loop");
    add_common(simulate);
    simulate->add_option("--baseline", opt.baseline, "reduction baseline architecture");
    CLI::App* counter = app.add_subcommand("counterfactual", "replay with one pinned model");
    add_common(counter);
    counter->add_option("--baseline", opt.baseline, "model to pin (also the baseline)");
    CLI::App* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient check");
    gradcheck->add_option("--seed", opt.seed, "sampling seed");
    gradcheck->add_option("--scale", opt.scale, "hidden-dim scale factor (default 0.125)");
    CLI::App* report = app.add_subcommand("report", "re-render CSVs from a run's report.json");
    report->add_option("--out", opt.out_dir, "run directory holding report.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (generate->parsed()) return cmd_generate(opt);
        if (train_cmd->parsed()) return cmd_train(opt);
        if (search->parsed()) return cmd_search(opt);
        if (simulate->parsed()) return cmd_simulate(opt);
        if (counter->parsed()) return cmd_counterfactual(opt);
        if (gradcheck->parsed()) return cmd_gradcheck(opt);
        if (report->parsed()) return cmd_report(opt);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
