#include "ranlstm/registry.hpp"

#include <atomic>
#include <mutex>

#include "ranlstm/nas.hpp"

namespace ranlstm {

namespace {

// Models named after a search-space candidate are charged the nominal
// (unscaled) architecture size; anything else is charged its actual size.
std::int64_t charge_for(const LstmModel& model) {
    try {
        return nominal_param_count(model.spec().name);
    } catch (const ConfigError&) {
        return param_count(model.spec(), true);
    }
}

}  // namespace

int ModelRegistry::publish(std::shared_ptr<const LstmModel> model) {
    if (!model) throw std::invalid_argument("publish: null model");
    const std::string name = model->spec().name;
    const std::int64_t proxy = charge_for(*model);
    std::unique_lock lock(mutex_);
    Entry& entry = entries_[name];
    entry.version += 1;
    entry.model = std::move(model);
    entry.proxy = proxy;
    return entry.version;
}

std::string ModelRegistry::activate(const std::string& name) {
    std::unique_lock lock(mutex_);
    const auto it = entries_.find(name);
    if (it == entries_.end())
        throw std::invalid_argument("activate: unknown model '" + name + "'");
    auto snap = std::make_shared<const ActiveSnapshot>(
        ActiveSnapshot{name, it->second.version, it->second.proxy, it->second.model});
    const auto prev = std::atomic_exchange(&active_, std::shared_ptr<const ActiveSnapshot>(snap));
    return prev ? prev->name : std::string{};
}

PredictionRecord ModelRegistry::predict(WindowView window, int t) const {
    const auto snap = std::atomic_load(&active_);
    if (!snap) throw std::runtime_error("predict: no active model");
    PredictionRecord rec;
    rec.t = t;
    rec.predicted_load = forward(*snap->model, window);
    rec.model_name = snap->name;
    rec.model_version = snap->version;
    rec.latency_proxy = snap->proxy;
    return rec;
}

bool ModelRegistry::has(const std::string& name) const {
    std::shared_lock lock(mutex_);
    return entries_.count(name) != 0;
}

std::optional<int> ModelRegistry::version_of(const std::string& name) const {
    std::shared_lock lock(mutex_);
    const auto it = entries_.find(name);
    if (it == entries_.end()) return std::nullopt;
    return it->second.version;
}

std::shared_ptr<const LstmModel> ModelRegistry::model(const std::string& name) const {
    std::shared_lock lock(mutex_);
    const auto it = entries_.find(name);
    return it == entries_.end() ? nullptr : it->second.model;
}

std::vector<std::string> ModelRegistry::names() const {
    std::shared_lock lock(mutex_);
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& [name, entry] : entries_) out.push_back(name);
    return out;
}

std::string ModelRegistry::active_name() const {
    const auto snap = std::atomic_load(&active_);
    return snap ? snap->name : std::string{};
}

std::int64_t ModelRegistry::latency_proxy_of(const std::string& name) const {
    std::shared_lock lock(mutex_);
    const auto it = entries_.find(name);
    if (it == entries_.end())
        throw std::invalid_argument("unknown model '" + name + "'");
    return it->second.proxy;
}

}  // namespace ranlstm
