#pragma once

// Versioned model registry for the inference agent. Predictions read an
// immutable snapshot of the active entry (name, version, model), so an
// activation is one atomic pointer swap and a predict never observes a torn
// name/version pair and never blocks on publishes of non-active models.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "ranlstm/lstm.hpp"

namespace ranlstm {

struct PredictionRecord {
    int t{};
    double predicted_load{};
    std::string model_name;
    int model_version{};
    std::int64_t latency_proxy{};  // parameter count charged for serving this model
};

class ModelRegistry {
public:
    ModelRegistry() = default;
    ModelRegistry(const ModelRegistry&) = delete;
    ModelRegistry& operator=(const ModelRegistry&) = delete;

    /// Inserts or replaces the entry named by the model's spec. Returns the
    /// new version (1 for a first publish, previous + 1 afterwards). The
    /// active snapshot is not touched, even when the active name is
    /// republished; re-activate to pick up a new version.
    int publish(std::shared_ptr<const LstmModel> model);

    /// Makes `name` the active model and returns the previously active name
    /// (empty if none). Unknown names throw std::invalid_argument and leave
    /// the registry unchanged.
    std::string activate(const std::string& name);

    /// One-step-ahead prediction with the active model. Throws
    /// std::runtime_error when nothing is active, std::invalid_argument on a
    /// window shape mismatch.
    PredictionRecord predict(WindowView window, int t) const;

    bool has(const std::string& name) const;
    std::optional<int> version_of(const std::string& name) const;
    std::shared_ptr<const LstmModel> model(const std::string& name) const;
    std::vector<std::string> names() const;
    std::string active_name() const;
    std::int64_t latency_proxy_of(const std::string& name) const;

private:
    struct Entry {
        std::shared_ptr<const LstmModel> model;
        int version{};
        std::int64_t proxy{};
    };
    struct ActiveSnapshot {
        std::string name;
        int version{};
        std::int64_t proxy{};
        std::shared_ptr<const LstmModel> model;
    };

    mutable std::shared_mutex mutex_;  // guards entries_; predict never takes it
    std::map<std::string, Entry> entries_;
    std::shared_ptr<const ActiveSnapshot> active_;  // accessed via atomic_load/store
};

}  // namespace ranlstm
