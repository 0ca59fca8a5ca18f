#include "ranlstm/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ranlstm/rng.hpp"

namespace ranlstm {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

double clip01(double v) { return std::min(1.0, std::max(0.0, v)); }

// Per-channel KPI synthesis: value = clip(offset + gain * clean(t + shift)
// + noise_scale * kpi_sigma * N(0,1)). Channels 1-4 (used by the 8- and
// 10-feature layouts) lead the load; the rest lag or correlate weakly.
struct KpiDef {
    double gain;
    double offset;
    int shift;
    double noise_scale;
};

constexpr std::array<KpiDef, kKpiChannels> kKpiDefs{{
    {0.70, 0.15, +3, 1.0},   // kpi0
    {-0.55, 0.85, +3, 1.0},  // kpi1
    {0.60, 0.20, +1, 1.0},   // kpi2
    {0.55, 0.10, +2, 1.0},   // kpi3
    {0.30, 0.50, -1, 2.0},   // kpi4
    {0.35, 0.40, -2, 2.0},   // kpi5
    {0.25, 0.55, -4, 2.5},   // kpi6
    {-0.30, 0.45, -1, 2.5},  // kpi7
    {0.20, 0.50, -3, 3.0},   // kpi8
    {0.25, 0.35, -2, 3.0},   // kpi9
    {0.15, 0.50, -1, 4.0},   // kpi10
    {-0.20, 0.60, -2, 4.0},  // kpi11
}};

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

}  // namespace

void TraceConfig::validate() const {
    require(duration_steps >= kStepsPerDay,
            "duration_steps: must cover at least one day (" +
                std::to_string(kStepsPerDay) + " steps), got " + std::to_string(duration_steps));
    require(base_load >= 0.0, "base_load: must be non-negative");
    require(diurnal_amplitude >= 0.0, "diurnal_amplitude: must be non-negative");
    require(weekly_amplitude >= 0.0, "weekly_amplitude: must be non-negative");
    require(peak_boost >= 0.0, "peak_boost: must be non-negative");
    require(noise_sigma >= 0.0, "noise_sigma: must be non-negative");
    require(kpi_noise_sigma >= 0.0, "kpi_noise_sigma: must be non-negative");
    require(surge_amplitude >= 0.0, "surge_amplitude: must be non-negative");
    require(surge_ramp_steps >= 1, "surge_ramp_steps: must be at least 1");
    require(burst_low > 0.0 && burst_low <= 1.0, "burst_low: must be in (0, 1]");
    require(burst_min_hold >= 1, "burst_min_hold: must be at least 1");
    require(burst_max_hold >= burst_min_hold,
            "burst_max_hold: must be >= burst_min_hold");
    for (int h : peak_hours)
        require(h >= 0 && h <= 23, "peak_hours: hour " + std::to_string(h) + " outside 0..23");
    for (const auto& w : critical_windows) {
        require(w.duration >= 1, "critical_windows: duration must be at least 1, got " +
                                     std::to_string(w.duration));
        require(w.start >= 0, "critical_windows: start must be non-negative, got " +
                                  std::to_string(w.start));
    }
}

TraceSeries generate_trace(const TraceConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    const int n = cfg.duration_steps;
    Rng rng(seed);

    // Surge profile first: burst levels alternate between burst_low and 1.0
    // with seeded hold times, shaped by a trapezoid ramp per window. Draw
    // order is fixed (windows in config order, then per-step noise), so the
    // trace is a pure function of (cfg, seed).
    std::vector<double> surge(n, 0.0);
    std::vector<char> critical(n, 0);
    for (const auto& w : cfg.critical_windows) {
        const int end = std::min(w.start + w.duration, n);
        if (w.start >= n) continue;
        double level = rng.uniform() < 0.5 ? cfg.burst_low : 1.0;
        int hold = cfg.burst_min_hold +
                   static_cast<int>(rng.below(
                       static_cast<std::uint64_t>(cfg.burst_max_hold - cfg.burst_min_hold + 1)));
        for (int t = w.start; t < end; ++t) {
            if (hold == 0) {
                level = level == 1.0 ? cfg.burst_low : 1.0;
                hold = cfg.burst_min_hold +
                       static_cast<int>(rng.below(static_cast<std::uint64_t>(
                           cfg.burst_max_hold - cfg.burst_min_hold + 1)));
            }
            --hold;
            const double into = static_cast<double>(t - w.start + 1);
            const double left = static_cast<double>(w.start + w.duration - t);
            const double ramp = std::min(
                1.0, std::min(into / cfg.surge_ramp_steps, left / cfg.surge_ramp_steps));
            surge[t] = cfg.surge_amplitude * ramp * level;
            critical[t] = 1;
        }
    }

    std::vector<char> peak_hour(24, 0);
    for (int h : cfg.peak_hours) peak_hour[h] = 1;

    // Clean (pre-noise, pre-clip) load; KPI channels read it at small shifts.
    std::vector<double> clean(n);
    for (int t = 0; t < n; ++t) {
        const double hour_frac = static_cast<double>(t % kStepsPerDay) / kStepsPerHour;
        double v = cfg.base_load;
        v += cfg.diurnal_amplitude * std::sin(kTwoPi * (hour_frac - 6.0) / 24.0);
        if (is_weekend(t)) v -= cfg.weekly_amplitude;
        if (peak_hour[hour_of_day(t)]) v += cfg.peak_boost;
        v += surge[t];
        clean[t] = v;
    }

    TraceSeries series;
    series.seed = seed;
    series.samples.resize(n);
    for (int t = 0; t < n; ++t) {
        TraceSample& s = series.samples[t];
        s.t = t;
        s.hour_of_day = hour_of_day(t);
        s.day_of_week = day_of_week(t);
        s.is_weekend = is_weekend(t);
        s.is_peak = peak_hour[s.hour_of_day] != 0;
        s.is_critical_event = critical[t] != 0;
        s.load = clip01(clean[t] + cfg.noise_sigma * rng.gaussian());
        for (int k = 0; k < kKpiChannels; ++k) {
            const KpiDef& d = kKpiDefs[k];
            const int src = std::clamp(t + d.shift, 0, n - 1);
            s.kpis[k] = clip01(d.offset + d.gain * clean[src] +
                               d.noise_scale * cfg.kpi_noise_sigma * rng.gaussian());
        }
    }
    return series;
}

FeatureVector extract_features(const TraceSeries& series, int index, int d_x) {
    if (std::find(kFeatureSizes.begin(), kFeatureSizes.end(), d_x) == kFeatureSizes.end())
        throw ConfigError("d_x: unsupported feature size " + std::to_string(d_x) +
                          " (supported: 6, 8, 10, 16)");
    const TraceSample& s = series.samples.at(static_cast<std::size_t>(index));
    FeatureVector f;
    f.reserve(static_cast<std::size_t>(d_x));
    f.push_back(s.load);
    f.push_back(std::sin(kTwoPi * s.hour_of_day / 24.0));
    f.push_back(std::cos(kTwoPi * s.hour_of_day / 24.0));
    f.push_back(s.day_of_week / 6.0);
    f.push_back(s.is_weekend ? 1.0 : 0.0);
    f.push_back(s.is_peak ? 1.0 : 0.0);
    if (d_x >= 8) {
        f.push_back(s.kpis[0]);
        f.push_back(s.kpis[1]);
    }
    if (d_x >= 10) {
        f.push_back(s.kpis[2]);
        f.push_back(s.kpis[3]);
    }
    if (d_x == 16) {
        for (int k = 4; k <= 9; ++k) f.push_back(s.kpis[k]);
    }
    return f;
}

WindowView WindowedDataset::window(int i, int d_sub) const {
    const int cols = d_sub == 0 ? d_x : d_sub;
    return WindowView{inputs[static_cast<std::size_t>(i)].data(), window_len, cols, d_x};
}

WindowedDataset window_dataset(const TraceSeries& series, int window_len, int d_x) {
    if (window_len < 1) throw ConfigError("window_len: must be at least 1");
    const int n = series.size();
    if (n < window_len + 1)
        throw ConfigError("series too short: need at least window_len+1 = " +
                          std::to_string(window_len + 1) + " samples, got " + std::to_string(n));
    WindowedDataset ds;
    ds.window_len = window_len;
    ds.d_x = d_x;
    const int count = n - window_len;
    ds.inputs.reserve(static_cast<std::size_t>(count));
    ds.targets.reserve(static_cast<std::size_t>(count));
    ds.labels.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        std::vector<double> rows;
        rows.reserve(static_cast<std::size_t>(window_len) * d_x);
        for (int r = 0; r < window_len; ++r) {
            FeatureVector f = extract_features(series, i + r, d_x);
            rows.insert(rows.end(), f.begin(), f.end());
        }
        ds.inputs.push_back(std::move(rows));
        const TraceSample& target = series.samples[static_cast<std::size_t>(i + window_len)];
        ds.targets.push_back(target.load);
        ds.labels.push_back(target.is_critical_event ? Regime::Critical : Regime::Regular);
    }
    return ds;
}

WindowedDataset dataset_slice(const WindowedDataset& ds, int first, int count) {
    if (first < 0 || count < 0 || first + count > ds.size())
        throw ConfigError("dataset_slice: range [" + std::to_string(first) + ", " +
                          std::to_string(first + count) + ") outside dataset of size " +
                          std::to_string(ds.size()));
    WindowedDataset out;
    out.window_len = ds.window_len;
    out.d_x = ds.d_x;
    out.inputs.assign(ds.inputs.begin() + first, ds.inputs.begin() + first + count);
    out.targets.assign(ds.targets.begin() + first, ds.targets.begin() + first + count);
    out.labels.assign(ds.labels.begin() + first, ds.labels.begin() + first + count);
    return out;
}

void write_trace_csv(const TraceSeries& series, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "t,load,hour,dow,weekend,peak,critical";
    for (int k = 0; k < kKpiChannels; ++k) out << ",kpi" << k;
    out << "\n";
    char buf[32];
    for (const TraceSample& s : series.samples) {
        out << s.t;
        std::snprintf(buf, sizeof buf, ",%.9f", s.load);
        out << buf;
        out << ',' << s.hour_of_day << ',' << s.day_of_week << ',' << (s.is_weekend ? 1 : 0)
            << ',' << (s.is_peak ? 1 : 0) << ',' << (s.is_critical_event ? 1 : 0);
        for (int k = 0; k < kKpiChannels; ++k) {
            std::snprintf(buf, sizeof buf, ",%.9f", s.kpis[k]);
            out << buf;
        }
        out << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

TraceSeries read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty trace file: " + path);
    TraceSeries series;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        auto next = [&]() {
            if (!std::getline(ss, cell, ','))
                throw std::runtime_error(path + " line " + std::to_string(line_no) +
                                         ": too few columns");
            return cell;
        };
        TraceSample s;
        s.t = std::stoi(next());
        s.load = std::stod(next());
        s.hour_of_day = std::stoi(next());
        s.day_of_week = std::stoi(next());
        s.is_weekend = next() == "1";
        s.is_peak = next() == "1";
        s.is_critical_event = next() == "1";
        for (int k = 0; k < kKpiChannels; ++k) s.kpis[k] = std::stod(next());
        series.samples.push_back(s);
    }
    return series;
}

}  // namespace ranlstm
