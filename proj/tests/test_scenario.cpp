#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <string>
#include <vector>

#include "doctest.h"
#include "ranlstm/scenario.hpp"

using namespace ranlstm;

namespace {

std::string parse_error(const std::string& text) {
    try {
        (void)parse_scenario_text(text, "inline");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("empty input resolves to the documented defaults") {
    const ScenarioConfig cfg = parse_scenario_text("", "inline");
    CHECK(cfg.duration_steps == 4320);
    CHECK(cfg.window_len == 24);
    CHECK(cfg.warmup_fraction == 0.40);
    CHECK(cfg.warmup_steps() == 1728);
    CHECK(cfg.online_steps() == 2592);
    CHECK(cfg.rapp_period == 2000);
    CHECK(cfg.rapp_delay_steps == 120);
    CHECK(cfg.rapp_history_steps == 1440);
    CHECK(cfg.scale == 1.0);
    CHECK(cfg.default_threshold == 0.95);
    CHECK(cfg.trace_seed == 42);
    CHECK(cfg.train_seed == 303);
    CHECK(cfg.search_seed == 7);
    CHECK(cfg.baseline_model == "Deep-Performance");
    CHECK(cfg.out_dir == "out");
    CHECK(cfg.workers == 1);
    CHECK(cfg.refresh_epochs == 3);

    // the scenario layer deviates from the library default only here
    CHECK(cfg.train.learning_rate == 5e-3);
    CHECK(cfg.train.epochs == 20);
    CHECK(cfg.train.seed == 303);     // synced from train_seed
    CHECK(cfg.train.workers == 1);
    CHECK(cfg.train.optimizer == TrainConfig::Optimizer::Adam);
    CHECK(cfg.train.clip_norm == 1.0);

    CHECK(cfg.policy.regular_model == "Balanced-Medium");
    CHECK(cfg.policy.critical_model.empty());  // resolved by the search
    CHECK(cfg.policy.tau_hi == 0.75);
    CHECK(cfg.policy.tau_lo == 0.60);
    CHECK(cfg.policy.min_dwell == 30);
    CHECK(cfg.policy.surprise_threshold == 0.10);

    REQUIRE(cfg.trace.critical_windows.size() == 4);
    CHECK(cfg.trace.critical_windows[0].start == 60);
    CHECK(cfg.trace.critical_windows[3].start == 2040);
    for (const CriticalWindow& w : cfg.trace.critical_windows) CHECK(w.duration == 120);
}

TEST_CASE("keys are assigned to their sections") {
    const ScenarioConfig cfg = parse_scenario_text(
        "duration_steps = 2880\n"
        "scale = 0.25\n"
        "train_seed = 99\n"
        "workers = 2\n"
        "\n"
        "[trace]\n"
        "base_load = 0.31\n"
        "peak_hours = 9,10,18\n"
        "critical_windows = 100:60, 900:30\n"
        "\n"
        "[train]\n"
        "epochs = 5\n"
        "refresh_epochs = 1\n"
        "optimizer = sgd\n"
        "learning_rate = 0.01\n"
        "\n"
        "[policy]\n"
        "critical_model = Deep-Performance\n"
        "tau_hi = 0.8\n"
        "min_dwell = 10\n",
        "inline");
    CHECK(cfg.duration_steps == 2880);
    CHECK(cfg.scale == 0.25);
    CHECK(cfg.trace.base_load == 0.31);
    CHECK(cfg.trace.peak_hours == std::vector<int>{9, 10, 18});
    REQUIRE(cfg.trace.critical_windows.size() == 2);
    CHECK(cfg.trace.critical_windows[1].start == 900);
    CHECK(cfg.trace.critical_windows[1].duration == 30);
    CHECK(cfg.train.epochs == 5);
    CHECK(cfg.refresh_epochs == 1);
    CHECK(cfg.train.optimizer == TrainConfig::Optimizer::Sgd);
    CHECK(cfg.train.learning_rate == 0.01);
    CHECK(cfg.train.seed == 99);
    CHECK(cfg.train.workers == 2);
    CHECK(cfg.policy.critical_model == "Deep-Performance");
    CHECK(cfg.policy.tau_hi == 0.8);
    CHECK(cfg.policy.min_dwell == 10);
}

TEST_CASE("comments, blank lines and whitespace are tolerated") {
    const ScenarioConfig cfg = parse_scenario_text(
        "# leading comment\n"
        "\n"
        "   duration_steps   =  2160   # trailing comment\n"
        "\t[trace]\t\n"
        "  noise_sigma=0.0\n",
        "inline");
    CHECK(cfg.duration_steps == 2160);
    CHECK(cfg.trace.noise_sigma == 0.0);
}

TEST_CASE("critical_model auto means deferred to the search") {
    const ScenarioConfig cfg =
        parse_scenario_text("[policy]\ncritical_model = auto\n", "inline");
    CHECK(cfg.policy.critical_model.empty());
}

TEST_CASE("an empty critical_windows value clears the default windows") {
    const ScenarioConfig cfg =
        parse_scenario_text("[trace]\ncritical_windows =\n", "inline");
    CHECK(cfg.trace.critical_windows.empty());
}

TEST_CASE("parse errors carry the origin, line number and offending token") {
    std::string msg = parse_error("bogus = 1\n");
    CHECK(msg.find("inline line 1") != std::string::npos);
    CHECK(msg.find("bogus") != std::string::npos);

    msg = parse_error("duration_steps = 2000\n\n[trace]\nmystery = 3\n");
    CHECK(msg.find("line 4") != std::string::npos);
    CHECK(msg.find("[trace]") != std::string::npos);

    msg = parse_error("duration_steps = soon\n");
    CHECK(msg.find("expects an integer") != std::string::npos);
    CHECK(msg.find("soon") != std::string::npos);

    msg = parse_error("warmup_fraction = half\n");
    CHECK(msg.find("expects a number") != std::string::npos);

    msg = parse_error("[orbit]\n");
    CHECK(msg.find("unknown section") != std::string::npos);

    msg = parse_error("[trace\n");
    CHECK(msg.find("malformed section header") != std::string::npos);

    msg = parse_error("duration_steps\n");
    CHECK(msg.find("expected key = value") != std::string::npos);

    msg = parse_error("= 5\n");
    CHECK(msg.find("empty key") != std::string::npos);

    msg = parse_error("[trace]\ncritical_windows = 100\n");
    CHECK(msg.find("start:duration") != std::string::npos);

    msg = parse_error("[train]\noptimizer = rmsprop\n");
    CHECK(msg.find("adam or sgd") != std::string::npos);

    msg = parse_error("trace_seed = -4\n");
    CHECK(msg.find("non-negative") != std::string::npos);
}

TEST_CASE("cross-field validation names the keys involved") {
    std::string msg = parse_error("rapp_period = 200\nwindow_len = 24\n");
    CHECK(msg.find("rapp_period") != std::string::npos);
    CHECK(msg.find("window_len") != std::string::npos);
    CHECK(msg.find("200") != std::string::npos);
    CHECK(msg.find("240") != std::string::npos);

    msg = parse_error("duration_steps = 1999\n");  // below the default rapp_period
    CHECK(msg.find("duration_steps") != std::string::npos);
    CHECK(msg.find("rapp_period") != std::string::npos);

    CHECK(parse_error("scale = 0\n").find("scale") != std::string::npos);
    CHECK(parse_error("scale = 1.5\n").find("(0, 1]") != std::string::npos);
    CHECK(parse_error("rapp_history_steps = 20\n").find("rapp_history_steps") !=
          std::string::npos);
    CHECK(parse_error("default_threshold = 1.2\n").find("default_threshold") !=
          std::string::npos);
    CHECK(parse_error("workers = 0\n").find("workers") != std::string::npos);
    CHECK(parse_error("out_dir =\n").find("out_dir") != std::string::npos);

    msg = parse_error("[policy]\ntau_hi = 0.5\ntau_lo = 0.6\n");
    CHECK(msg.find("tau_lo") != std::string::npos);
    CHECK(msg.find("tau_hi") != std::string::npos);

    // warmup must leave room for at least one training window
    msg = parse_error(
        "duration_steps = 2000\nwarmup_fraction = 0.01\nwindow_len = 24\n");
    CHECK(msg.find("warmup") != std::string::npos);
}

TEST_CASE("warmup length rounds to nearest instead of truncating") {
    const ScenarioConfig cfg = parse_scenario_text(
        "duration_steps = 2000\nwarmup_fraction = 0.95\nrapp_period = 240\n", "inline");
    CHECK(cfg.warmup_steps() == 1900);
    CHECK(cfg.online_steps() == 100);
}

TEST_CASE("echo round-trips exactly, including unusual doubles") {
    ScenarioConfig cfg = parse_scenario_text("", "inline");
    cfg.warmup_fraction = 0.3000000000000004;
    cfg.scale = 0.1;
    cfg.train.learning_rate = 1e-3;
    cfg.trace.noise_sigma = 0.012345678901234567;
    cfg.trace.peak_hours = {0, 23};
    cfg.trace.critical_windows = {{10, 60}, {2000, 120}};
    cfg.policy.critical_model = "Ultra-Performance";
    cfg.out_dir = "runs/echo test";
    cfg.train_seed = 18446744073709551615ULL;  // u64 max survives
    cfg.train.seed = cfg.train_seed;

    const std::string echoed = echo_scenario(cfg);
    const ScenarioConfig back = parse_scenario_text(echoed, "echo");
    CHECK(back == cfg);
    CHECK(echo_scenario(back) == echoed);

    // defaults round-trip too
    const ScenarioConfig def = parse_scenario_text("", "inline");
    CHECK(parse_scenario_text(echo_scenario(def), "echo") == def);
}

TEST_CASE("a missing scenario file is reported by path") {
    try {
        (void)parse_scenario("no_such_scenario.cfg");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("no_such_scenario.cfg") != std::string::npos);
    }
}
