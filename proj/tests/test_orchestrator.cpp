#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "ranlstm/nas.hpp"
#include "ranlstm/orchestrator.hpp"
#include "ranlstm/rng.hpp"

using namespace ranlstm;

namespace {

PolicyConfig policy(double hi = 0.75, double lo = 0.60, int dwell = 3,
                    double surprise = 0.10) {
    PolicyConfig p;
    p.tau_hi = hi;
    p.tau_lo = lo;
    p.min_dwell = dwell;
    p.surprise_threshold = surprise;
    return p;
}

OrchestrationDecision cost_entry(std::int64_t cost) {
    OrchestrationDecision d;
    d.param_cost = cost;
    return d;
}

ModelRegistry& shared_registry() {
    static ModelRegistry reg;
    static const bool filled = [] {
        const auto space = candidate_space();
        reg.publish(std::make_shared<const LstmModel>(init_model(space[3], 1)));  // Balanced-Medium
        reg.publish(std::make_shared<const LstmModel>(init_model(space[4], 2)));  // Deep-Performance
        return true;
    }();
    (void)filled;
    return reg;
}

}  // namespace

TEST_CASE("policy validation cites the offending keys") {
    CHECK_NOTHROW(policy().validate());
    try {
        policy(0.6, 0.6).validate();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("tau_lo") != std::string::npos);
        CHECK(msg.find("tau_hi") != std::string::npos);
    }
    CHECK_THROWS_AS(policy(0.5, 0.7).validate(), ConfigError);
    CHECK_THROWS_AS(policy(0.75, 0.6, 0).validate(), ConfigError);
    CHECK_THROWS_AS(policy(0.75, 0.6, 3, 0.0).validate(), ConfigError);
    PolicyConfig p = policy();
    p.regular_model.clear();
    CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("decision reasons round-trip through their names") {
    for (DecisionReason r : {DecisionReason::Init, DecisionReason::LoadThreshold,
                             DecisionReason::PredictionSurprise, DecisionReason::DwellHold})
        CHECK(parse_reason(to_string(r)) == r);
    CHECK_THROWS_AS(parse_reason("whim"), std::invalid_argument);
}

TEST_CASE("smoothed load is the plain mean and rejects empty input") {
    const std::vector<double> v{0.2, 0.4, 0.9};
    CHECK(smoothed_load(v) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(smoothed_load(std::vector<double>{0.7}) == 0.7);
    CHECK_THROWS_AS(smoothed_load(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("load threshold escalates and dwell gates the exit") {
    RegimeDetector d(policy(0.75, 0.60, 3));
    auto s = d.observe(0.8, 0.0);
    CHECK(s.regime == Regime::Critical);
    CHECK(s.reason == DecisionReason::LoadThreshold);
    CHECK(d.dwell() == 1);

    s = d.observe(0.8, 0.0);  // smoothed 0.8, still high
    CHECK(s.regime == Regime::Critical);
    CHECK(d.dwell() == 2);

    s = d.observe(0.0, 0.0);  // smoothed 0.533 < tau_lo, dwell 3 satisfied
    CHECK(s.regime == Regime::Regular);
    CHECK(s.reason == DecisionReason::LoadThreshold);
    CHECK(d.dwell() == 0);

    s = d.observe(0.0, 0.0);
    CHECK(s.regime == Regime::Regular);
}

TEST_CASE("an early exit attempt is denied and labelled as a dwell hold") {
    RegimeDetector d(policy(0.75, 0.60, 4));
    CHECK(d.observe(0.9, 0.0).regime == Regime::Critical);
    auto s = d.observe(0.0, 0.0);  // smoothed 0.45 < tau_lo but dwell 2 < 4
    CHECK(s.regime == Regime::Critical);
    CHECK(s.reason == DecisionReason::DwellHold);
    s = d.observe(0.0, 0.0);  // dwell 3
    CHECK(s.regime == Regime::Critical);
    CHECK(s.reason == DecisionReason::DwellHold);
    s = d.observe(0.0, 0.0);  // dwell 4: allowed out
    CHECK(s.regime == Regime::Regular);
}

TEST_CASE("a prediction surprise escalates at calm load") {
    RegimeDetector d(policy(0.75, 0.60, 2));
    auto s = d.observe(0.5, 0.05);  // error below the threshold
    CHECK(s.regime == Regime::Regular);
    s = d.observe(0.5, 0.11);
    CHECK(s.regime == Regime::Critical);
    CHECK(s.reason == DecisionReason::PredictionSurprise);
    s = d.observe(0.5, 0.0);  // smoothed 0.5 < tau_lo, dwell 2 reached
    CHECK(s.regime == Regime::Regular);
}

TEST_CASE("smoothing forgets loads older than five steps") {
    // a single spike escalates; once it leaves the 5-step window the mean
    // collapses to zero and the detector must release
    RegimeDetector d(policy(0.75, 0.60, 1));
    CHECK(d.observe(100.0, 0.0).regime == Regime::Critical);
    for (int i = 0; i < 4; ++i) CHECK(d.observe(0.0, 0.0).regime == Regime::Critical);
    CHECK(d.observe(0.0, 0.0).regime == Regime::Regular);
}

TEST_CASE("loads inside the hysteresis band never toggle the state") {
    const PolicyConfig cfg = policy(0.75, 0.60, 3);

    // starting Regular: the band never exceeds tau_hi, so no escalation
    RegimeDetector calm(cfg);
    Rng rng(31);
    for (int i = 0; i < 300; ++i) {
        const double load = rng.uniform(cfg.tau_lo + 1e-6, cfg.tau_hi - 1e-6);
        CHECK(calm.observe(load, 0.0).regime == Regime::Regular);
    }

    // starting Critical: the band never drops below tau_lo, so no release,
    // even long after the dwell requirement is met
    RegimeDetector hot(cfg);
    CHECK(hot.observe(1.0, 0.0).regime == Regime::Critical);
    int changes = 0;
    Regime prev = Regime::Critical;
    for (int i = 0; i < 300; ++i) {
        const double load = rng.uniform(cfg.tau_lo + 1e-6, cfg.tau_hi - 1e-6);
        const Regime now = hot.observe(load, 0.0).regime;
        if (now != prev) ++changes;
        prev = now;
    }
    CHECK(changes == 0);
    CHECK(hot.regime() == Regime::Critical);
}

TEST_CASE("model selection follows the policy and flags switches") {
    const ModelRegistry& reg = shared_registry();
    PolicyConfig p = policy();
    p.regular_model = "Balanced-Medium";
    p.critical_model = "Deep-Performance";
    const std::map<std::string, double> scores{{"Balanced-Medium", 0.8},
                                               {"Deep-Performance", 0.9}};

    auto d = select_model(Regime::Regular, p, reg, scores, "", 10, DecisionReason::Init);
    CHECK(d.chosen_model == "Balanced-Medium");
    CHECK(d.param_cost == 73851);
    CHECK_FALSE(d.switched);  // no previous choice yet
    CHECK_FALSE(d.fallback);
    CHECK(d.t == 10);
    CHECK(d.regime == Regime::Regular);
    CHECK(d.reason == DecisionReason::Init);

    d = select_model(Regime::Critical, p, reg, scores, "Balanced-Medium", 11,
                     DecisionReason::LoadThreshold);
    CHECK(d.chosen_model == "Deep-Performance");
    CHECK(d.param_cost == 205073);
    CHECK(d.switched);

    d = select_model(Regime::Critical, p, reg, scores, "Deep-Performance", 12,
                     DecisionReason::LoadThreshold);
    CHECK_FALSE(d.switched);  // same choice as before
}

TEST_CASE("an empty critical choice reuses the regular model") {
    const ModelRegistry& reg = shared_registry();
    PolicyConfig p = policy();
    p.regular_model = "Balanced-Medium";
    p.critical_model.clear();
    const auto d = select_model(Regime::Critical, p, reg, {}, "Balanced-Medium", 5,
                                DecisionReason::LoadThreshold);
    CHECK(d.chosen_model == "Balanced-Medium");
    CHECK_FALSE(d.fallback);
}

TEST_CASE("a missing configured model falls back to the best critical scorer") {
    const ModelRegistry& reg = shared_registry();
    PolicyConfig p = policy();
    p.regular_model = "Ultra-Performance";  // never published here
    const std::map<std::string, double> scores{{"Balanced-Medium", 0.95},
                                               {"Deep-Performance", 0.90}};
    const auto d = select_model(Regime::Regular, p, reg, scores, "", 0, DecisionReason::Init);
    CHECK(d.fallback);
    CHECK(d.chosen_model == "Balanced-Medium");  // higher critical score wins

    // without scores the fallback still lands on something that is present
    const auto blind = select_model(Regime::Regular, p, reg, {}, "", 0, DecisionReason::Init);
    CHECK(blind.fallback);
    CHECK(reg.has(blind.chosen_model));
}

TEST_CASE("selection requires a non-empty registry") {
    ModelRegistry empty;
    CHECK_THROWS_AS(
        select_model(Regime::Regular, policy(), empty, {}, "", 0, DecisionReason::Init),
        std::runtime_error);
}

TEST_CASE("complexity reduction oracles") {
    // serving Balanced-Medium exclusively against a Deep-Performance baseline:
    // 100 * (1 - 73851 / 205073)
    std::vector<OrchestrationDecision> log(100, cost_entry(73851));
    const double all_bm = complexity_reduction(log, "Deep-Performance");
    CHECK(all_bm == doctest::Approx(100.0 * (1.0 - 73851.0 / 205073.0)).epsilon(1e-12));
    CHECK(all_bm == doctest::Approx(63.9879).epsilon(1e-4));

    // a 95/5 split between Balanced-Medium and Deep-Performance
    for (int i = 0; i < 5; ++i) log[static_cast<std::size_t>(i)].param_cost = 205073;
    const double mixed = complexity_reduction(log, "Deep-Performance");
    const double mean = (95.0 * 73851.0 + 5.0 * 205073.0) / 100.0;
    CHECK(mixed == doctest::Approx(100.0 * (1.0 - mean / 205073.0)).epsilon(1e-12));
    CHECK(mixed == doctest::Approx(60.7886).epsilon(1e-4));

    // both overloads agree
    CHECK(complexity_reduction(mean, "Deep-Performance") ==
          doctest::Approx(mixed).epsilon(1e-12));

    // serving the baseline itself saves nothing; serving above it is negative
    const std::vector<OrchestrationDecision> same(10, cost_entry(205073));
    CHECK(complexity_reduction(same, "Deep-Performance") ==
          doctest::Approx(0.0).epsilon(1e-12));
    const std::vector<OrchestrationDecision> heavy(10, cost_entry(2068097));
    CHECK(complexity_reduction(heavy, "Deep-Performance") < 0.0);

    CHECK_THROWS_AS(complexity_reduction(log, "Gigantic-9000"), ConfigError);
    CHECK_THROWS_AS(
        complexity_reduction(std::vector<OrchestrationDecision>{}, "Deep-Performance"),
        std::invalid_argument);
}

TEST_CASE("reduction is monotone in the served cost") {
    double last = 1e9;
    for (std::int64_t cost : {5025LL, 18241LL, 31137LL, 73851LL, 205073LL}) {
        const std::vector<OrchestrationDecision> log(7, cost_entry(cost));
        const double red = complexity_reduction(log, "Ultra-Performance");
        CHECK(red < last);
        CHECK(red > 0.0);  // everything is cheaper than the largest candidate
        last = red;
    }
}
