#include "ranlstm/scenario.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace ranlstm {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

struct Parser {
    ScenarioConfig cfg;
    std::string origin;
    int line_no{};

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError(origin + " line " + std::to_string(line_no) + ": " + msg);
    }

    long long to_int(const std::string& key, const std::string& v) const {
        long long out{};
        const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
        if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
            fail("key '" + key + "' expects an integer, got '" + v + "'");
        return out;
    }

    std::uint64_t to_u64(const std::string& key, const std::string& v) const {
        std::uint64_t out{};
        const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
        if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
            fail("key '" + key + "' expects a non-negative integer, got '" + v + "'");
        return out;
    }

    double to_double(const std::string& key, const std::string& v) const {
        double out{};
        const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
        if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
            fail("key '" + key + "' expects a number, got '" + v + "'");
        return out;
    }

    std::vector<int> to_int_list(const std::string& key, const std::string& v) const {
        std::vector<int> out;
        if (trim(v).empty()) return out;
        std::istringstream ss(v);
        std::string cell;
        while (std::getline(ss, cell, ','))
            out.push_back(static_cast<int>(to_int(key, trim(cell))));
        return out;
    }

    std::vector<CriticalWindow> to_windows(const std::string& key, const std::string& v) const {
        std::vector<CriticalWindow> out;
        if (trim(v).empty()) return out;
        std::istringstream ss(v);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cell = trim(cell);
            const auto colon = cell.find(':');
            if (colon == std::string::npos)
                fail("key '" + key + "' expects start:duration pairs, got '" + cell + "'");
            CriticalWindow w;
            w.start = static_cast<int>(to_int(key, trim(cell.substr(0, colon))));
            w.duration = static_cast<int>(to_int(key, trim(cell.substr(colon + 1))));
            out.push_back(w);
        }
        return out;
    }

    void set_general(const std::string& key, const std::string& v) {
        if (key == "duration_steps") cfg.duration_steps = static_cast<int>(to_int(key, v));
        else if (key == "window_len") cfg.window_len = static_cast<int>(to_int(key, v));
        else if (key == "warmup_fraction") cfg.warmup_fraction = to_double(key, v);
        else if (key == "rapp_period") cfg.rapp_period = static_cast<int>(to_int(key, v));
        else if (key == "rapp_delay_steps") cfg.rapp_delay_steps = static_cast<int>(to_int(key, v));
        else if (key == "rapp_history_steps")
            cfg.rapp_history_steps = static_cast<int>(to_int(key, v));
        else if (key == "scale") cfg.scale = to_double(key, v);
        else if (key == "default_threshold") cfg.default_threshold = to_double(key, v);
        else if (key == "trace_seed") cfg.trace_seed = to_u64(key, v);
        else if (key == "train_seed") cfg.train_seed = to_u64(key, v);
        else if (key == "search_seed") cfg.search_seed = to_u64(key, v);
        else if (key == "baseline_model") cfg.baseline_model = v;
        else if (key == "out_dir") cfg.out_dir = v;
        else if (key == "workers") cfg.workers = static_cast<int>(to_int(key, v));
        else fail("unknown key '" + key + "'");
    }

    void set_trace(const std::string& key, const std::string& v) {
        TraceConfig& t = cfg.trace;
        if (key == "base_load") t.base_load = to_double(key, v);
        else if (key == "diurnal_amplitude") t.diurnal_amplitude = to_double(key, v);
        else if (key == "weekly_amplitude") t.weekly_amplitude = to_double(key, v);
        else if (key == "peak_boost") t.peak_boost = to_double(key, v);
        else if (key == "peak_hours") t.peak_hours = to_int_list(key, v);
        else if (key == "noise_sigma") t.noise_sigma = to_double(key, v);
        else if (key == "kpi_noise_sigma") t.kpi_noise_sigma = to_double(key, v);
        else if (key == "surge_amplitude") t.surge_amplitude = to_double(key, v);
        else if (key == "surge_ramp_steps") t.surge_ramp_steps = static_cast<int>(to_int(key, v));
        else if (key == "burst_low") t.burst_low = to_double(key, v);
        else if (key == "burst_min_hold") t.burst_min_hold = static_cast<int>(to_int(key, v));
        else if (key == "burst_max_hold") t.burst_max_hold = static_cast<int>(to_int(key, v));
        else if (key == "critical_windows") t.critical_windows = to_windows(key, v);
        else fail("unknown key '" + key + "' in section [trace]");
    }

    void set_train(const std::string& key, const std::string& v) {
        TrainConfig& t = cfg.train;
        if (key == "epochs") t.epochs = static_cast<int>(to_int(key, v));
        else if (key == "refresh_epochs") cfg.refresh_epochs = static_cast<int>(to_int(key, v));
        else if (key == "batch_size") t.batch_size = static_cast<int>(to_int(key, v));
        else if (key == "learning_rate") t.learning_rate = to_double(key, v);
        else if (key == "clip_norm") t.clip_norm = to_double(key, v);
        else if (key == "optimizer") {
            if (v == "adam") t.optimizer = TrainConfig::Optimizer::Adam;
            else if (v == "sgd") t.optimizer = TrainConfig::Optimizer::Sgd;
            else fail("key 'optimizer' expects adam or sgd, got '" + v + "'");
        } else if (key == "validation_fraction") t.validation_fraction = to_double(key, v);
        else fail("unknown key '" + key + "' in section [train]");
    }

    void set_policy(const std::string& key, const std::string& v) {
        PolicyConfig& p = cfg.policy;
        if (key == "regular_model") p.regular_model = v;
        else if (key == "critical_model") p.critical_model = v == "auto" ? std::string{} : v;
        else if (key == "tau_hi") p.tau_hi = to_double(key, v);
        else if (key == "tau_lo") p.tau_lo = to_double(key, v);
        else if (key == "min_dwell") p.min_dwell = static_cast<int>(to_int(key, v));
        else if (key == "surprise_threshold") p.surprise_threshold = to_double(key, v);
        else fail("unknown key '" + key + "' in section [policy]");
    }
};

}  // namespace

void ScenarioConfig::validate() const {
    TraceConfig full = trace;
    full.duration_steps = duration_steps;
    full.validate();
    train.validate();
    policy.validate();
    if (window_len < 1) throw ConfigError("window_len: must be at least 1");
    if (!(warmup_fraction > 0.0 && warmup_fraction < 1.0))
        throw ConfigError("warmup_fraction: must lie strictly between 0 and 1");
    if (rapp_period < 10 * window_len)
        throw ConfigError("rapp_period (" + std::to_string(rapp_period) +
                          ") must be at least 10 * window_len (" +
                          std::to_string(10 * window_len) + ")");
    if (duration_steps < rapp_period)
        throw ConfigError("duration_steps (" + std::to_string(duration_steps) +
                          ") must be at least rapp_period (" + std::to_string(rapp_period) +
                          ")");
    if (rapp_delay_steps < 0) throw ConfigError("rapp_delay_steps: must be non-negative");
    if (rapp_history_steps < window_len + 2)
        throw ConfigError("rapp_history_steps: must exceed window_len + 1");
    if (!(scale > 0.0 && scale <= 1.0))
        throw ConfigError("scale: must be in (0, 1], got " + fmt_double(scale));
    if (!(default_threshold >= 0.0 && default_threshold <= 1.0))
        throw ConfigError("default_threshold: must be in [0, 1]");
    if (refresh_epochs < 0) throw ConfigError("refresh_epochs: must be non-negative");
    if (workers < 1) throw ConfigError("workers: must be at least 1");
    if (baseline_model.empty()) throw ConfigError("baseline_model: must not be empty");
    if (out_dir.empty()) throw ConfigError("out_dir: must not be empty");
    const int warmup = warmup_steps();
    if (warmup < window_len + 4)
        throw ConfigError("warmup_fraction: warmup covers " + std::to_string(warmup) +
                          " steps, need at least window_len + 4 = " +
                          std::to_string(window_len + 4));
}

ScenarioConfig parse_scenario_text(const std::string& text, const std::string& origin) {
    Parser p;
    p.origin = origin;
    std::istringstream in(text);
    std::string raw;
    std::string section;  // empty = general
    while (std::getline(in, raw)) {
        ++p.line_no;
        std::string line = raw;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') p.fail("malformed section header '" + line + "'");
            section = line.substr(1, line.size() - 2);
            if (section != "trace" && section != "train" && section != "policy")
                p.fail("unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) p.fail("expected key = value, got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) p.fail("empty key");
        if (section.empty()) p.set_general(key, value);
        else if (section == "trace") p.set_trace(key, value);
        else if (section == "train") p.set_train(key, value);
        else p.set_policy(key, value);
    }
    p.cfg.train.seed = p.cfg.train_seed;
    p.cfg.train.workers = p.cfg.workers;
    p.cfg.validate();
    return p.cfg;
}

ScenarioConfig parse_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario_text(buf.str(), path);
}

std::string echo_scenario(const ScenarioConfig& cfg) {
    std::ostringstream out;
    out << "# resolved scenario configuration\n";
    out << "duration_steps = " << cfg.duration_steps << "\n";
    out << "window_len = " << cfg.window_len << "\n";
    out << "warmup_fraction = " << fmt_double(cfg.warmup_fraction) << "\n";
    out << "rapp_period = " << cfg.rapp_period << "\n";
    out << "rapp_delay_steps = " << cfg.rapp_delay_steps << "\n";
    out << "rapp_history_steps = " << cfg.rapp_history_steps << "\n";
    out << "scale = " << fmt_double(cfg.scale) << "\n";
    out << "default_threshold = " << fmt_double(cfg.default_threshold) << "\n";
    out << "trace_seed = " << cfg.trace_seed << "\n";
    out << "train_seed = " << cfg.train_seed << "\n";
    out << "search_seed = " << cfg.search_seed << "\n";
    out << "baseline_model = " << cfg.baseline_model << "\n";
    out << "out_dir = " << cfg.out_dir << "\n";
    out << "workers = " << cfg.workers << "\n";
    out << "\n[trace]\n";
    const TraceConfig& t = cfg.trace;
    out << "base_load = " << fmt_double(t.base_load) << "\n";
    out << "diurnal_amplitude = " << fmt_double(t.diurnal_amplitude) << "\n";
    out << "weekly_amplitude = " << fmt_double(t.weekly_amplitude) << "\n";
    out << "peak_boost = " << fmt_double(t.peak_boost) << "\n";
    out << "peak_hours = ";
    for (std::size_t i = 0; i < t.peak_hours.size(); ++i)
        out << (i ? "," : "") << t.peak_hours[i];
    out << "\n";
    out << "noise_sigma = " << fmt_double(t.noise_sigma) << "\n";
    out << "kpi_noise_sigma = " << fmt_double(t.kpi_noise_sigma) << "\n";
    out << "surge_amplitude = " << fmt_double(t.surge_amplitude) << "\n";
    out << "surge_ramp_steps = " << t.surge_ramp_steps << "\n";
    out << "burst_low = " << fmt_double(t.burst_low) << "\n";
    out << "burst_min_hold = " << t.burst_min_hold << "\n";
    out << "burst_max_hold = " << t.burst_max_hold << "\n";
    out << "critical_windows = ";
    for (std::size_t i = 0; i < t.critical_windows.size(); ++i)
        out << (i ? "," : "") << t.critical_windows[i].start << ":"
            << t.critical_windows[i].duration;
    out << "\n";
    out << "\n[train]\n";
    out << "epochs = " << cfg.train.epochs << "\n";
    out << "refresh_epochs = " << cfg.refresh_epochs << "\n";
    out << "batch_size = " << cfg.train.batch_size << "\n";
    out << "learning_rate = " << fmt_double(cfg.train.learning_rate) << "\n";
    out << "clip_norm = " << fmt_double(cfg.train.clip_norm) << "\n";
    out << "optimizer = "
        << (cfg.train.optimizer == TrainConfig::Optimizer::Adam ? "adam" : "sgd") << "\n";
    out << "validation_fraction = " << fmt_double(cfg.train.validation_fraction) << "\n";
    out << "\n[policy]\n";
    const PolicyConfig& p = cfg.policy;
    out << "regular_model = " << p.regular_model << "\n";
    out << "critical_model = " << (p.critical_model.empty() ? "auto" : p.critical_model) << "\n";
    out << "tau_hi = " << fmt_double(p.tau_hi) << "\n";
    out << "tau_lo = " << fmt_double(p.tau_lo) << "\n";
    out << "min_dwell = " << p.min_dwell << "\n";
    out << "surprise_threshold = " << fmt_double(p.surprise_threshold) << "\n";
    return out.str();
}

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
    return echo_scenario(a) == echo_scenario(b);
}

}  // namespace ranlstm
