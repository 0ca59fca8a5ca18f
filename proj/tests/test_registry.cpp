#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <atomic>
#include <memory>
#include <thread>
#include <vector>

#include "doctest.h"
#include "ranlstm/nas.hpp"
#include "ranlstm/registry.hpp"
#include "ranlstm/rng.hpp"

using namespace ranlstm;

namespace {

std::shared_ptr<const LstmModel> make_model(const std::string& name, std::uint64_t seed,
                                            double head_bias = 0.0) {
    ArchSpec spec;
    spec.name = name;
    spec.hidden_dims = {4};
    spec.d_x = 6;
    spec.window_len = 8;
    LstmModel m = init_model(spec, seed);
    if (head_bias != 0.0) {
        for (double& v : m.params()) v = 0.0;
        m.head_b() = head_bias;
    }
    return std::make_shared<const LstmModel>(std::move(m));
}

std::vector<double> window_data(std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> data(8 * 6);
    for (double& v : data) v = rng.uniform();
    return data;
}

WindowView view_of(const std::vector<double>& d) {
    return WindowView{d.data(), 8, 6, 6};
}

}  // namespace

TEST_CASE("publish counts versions per name and activation snapshots them") {
    ModelRegistry reg;
    CHECK(reg.names().empty());
    CHECK(reg.active_name().empty());
    CHECK_FALSE(reg.has("a"));
    CHECK_FALSE(reg.version_of("a").has_value());

    CHECK(reg.publish(make_model("a", 1)) == 1);
    CHECK(reg.publish(make_model("b", 2)) == 1);
    CHECK(reg.publish(make_model("a", 3)) == 2);
    CHECK(reg.has("a"));
    CHECK(reg.version_of("a") == 2);
    CHECK(reg.version_of("b") == 1);
    CHECK(reg.names() == std::vector<std::string>{"a", "b"});

    CHECK(reg.activate("a").empty());  // nothing was active before
    CHECK(reg.active_name() == "a");
    CHECK(reg.activate("b") == "a");
    CHECK(reg.active_name() == "b");
}

TEST_CASE("activating an unknown name throws and changes nothing") {
    ModelRegistry reg;
    reg.publish(make_model("a", 1));
    reg.activate("a");
    CHECK_THROWS_AS(reg.activate("ghost"), std::invalid_argument);
    CHECK(reg.active_name() == "a");
    const auto data = window_data(5);
    CHECK_NOTHROW(reg.predict(view_of(data), 0));
}

TEST_CASE("predict requires an active model") {
    ModelRegistry reg;
    reg.publish(make_model("a", 1));
    const auto data = window_data(5);
    CHECK_THROWS_AS(reg.predict(view_of(data), 0), std::runtime_error);
}

TEST_CASE("predict stamps the snapshot and charges the parameter count") {
    ModelRegistry reg;
    reg.publish(make_model("zeroed", 0, 0.4));
    reg.activate("zeroed");
    const auto data = window_data(9);
    const PredictionRecord rec = reg.predict(view_of(data), 17);
    CHECK(rec.t == 17);
    CHECK(rec.predicted_load == 0.4);  // all-zero weights, bias carries through
    CHECK(rec.model_name == "zeroed");
    CHECK(rec.model_version == 1);
    CHECK(rec.latency_proxy == reg.latency_proxy_of("zeroed"));
}

TEST_CASE("the latency proxy of a candidate is its nominal parameter count") {
    ModelRegistry reg;
    ArchSpec spec = candidate_space()[3];  // Balanced-Medium
    reg.publish(std::make_shared<const LstmModel>(init_model(spec, 3)));
    CHECK(reg.latency_proxy_of("Balanced-Medium") == 73851);
    CHECK(reg.latency_proxy_of("Balanced-Medium") ==
          nominal_param_count("Balanced-Medium"));
    CHECK_THROWS_AS(reg.latency_proxy_of("ghost"), std::invalid_argument);
}

TEST_CASE("a republish does not swap the active snapshot until re-activation") {
    ModelRegistry reg;
    reg.publish(make_model("a", 0, 0.25));
    reg.activate("a");
    const auto data = window_data(4);
    CHECK(reg.predict(view_of(data), 0).predicted_load == 0.25);

    reg.publish(make_model("a", 0, 0.75));  // version 2
    CHECK(reg.version_of("a") == 2);
    const PredictionRecord stale = reg.predict(view_of(data), 1);
    CHECK(stale.predicted_load == 0.25);  // still serving the activated snapshot
    CHECK(stale.model_version == 1);

    reg.activate("a");
    const PredictionRecord fresh = reg.predict(view_of(data), 2);
    CHECK(fresh.predicted_load == 0.75);
    CHECK(fresh.model_version == 2);
}

TEST_CASE("model lookup returns the stored object") {
    ModelRegistry reg;
    auto m = make_model("a", 8);
    reg.publish(m);
    CHECK(reg.model("a") == m);
    CHECK(reg.model("ghost") == nullptr);
}

TEST_CASE("readers always observe a consistent name/version/output tuple") {
    // two entries whose bias encodes their identity; concurrent republish and
    // flip-flop activation must never produce a mixed record
    ModelRegistry reg;
    reg.publish(make_model("left", 0, 1.0));
    reg.publish(make_model("right", 0, 2.0));
    reg.activate("left");

    std::atomic<bool> stop{false};
    std::atomic<int> torn{0};
    const auto data = window_data(21);

    std::vector<std::thread> readers;
    for (int r = 0; r < 2; ++r) {
        readers.emplace_back([&] {
            while (!stop.load(std::memory_order_relaxed)) {
                const PredictionRecord rec = reg.predict(view_of(data), 0);
                const double want = rec.model_name == "left" ? 1.0 : 2.0;
                if (rec.predicted_load != want) torn.fetch_add(1);
                if (rec.model_version < 1) torn.fetch_add(1);
            }
        });
    }

    std::thread writer([&] {
        for (int i = 0; i < 400; ++i) {
            reg.publish(make_model(i % 2 ? "left" : "right", 0, i % 2 ? 1.0 : 2.0));
            reg.activate(i % 2 ? "left" : "right");
        }
        stop.store(true);
    });

    writer.join();
    for (auto& t : readers) t.join();
    CHECK(torn.load() == 0);
    CHECK(reg.active_name() == "left");  // last activation in the loop
}
