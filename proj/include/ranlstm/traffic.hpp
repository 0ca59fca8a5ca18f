#pragma once

// Synthetic RAN cell-load traces: a diurnal/weekly load profile with peak
// hours, seeded noise, and critical surge windows, plus 12 KPI channels that
// correlate with the clean load at small per-channel time shifts. Also the
// feature layouts and the sliding-window dataset used by every model.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ranlstm/types.hpp"

namespace ranlstm {

inline constexpr int kStepsPerHour = 60;    // one step is one simulated minute
inline constexpr int kStepsPerDay = 24 * kStepsPerHour;
inline constexpr int kKpiChannels = 12;
inline constexpr std::array<int, 4> kFeatureSizes{6, 8, 10, 16};

/// Calendar fields are pure functions of the step index.
inline int hour_of_day(int t) { return (t / kStepsPerHour) % 24; }
inline int day_of_week(int t) { return (t / kStepsPerDay) % 7; }  // 0 = Monday
inline bool is_weekend(int t) { return day_of_week(t) >= 5; }

struct CriticalWindow {
    int start{};
    int duration{};
};

struct TraceConfig {
    int duration_steps{4320};
    double base_load{0.35};
    double diurnal_amplitude{0.25};
    double weekly_amplitude{0.06};   // load dip applied on weekend days
    double peak_boost{0.08};
    std::vector<int> peak_hours{8, 9, 17, 18, 19, 20};
    double noise_sigma{0.02};
    double kpi_noise_sigma{0.02};
    double surge_amplitude{0.5};
    int surge_ramp_steps{10};        // trapezoid edge length inside a window
    double burst_low{0.7};           // surge level alternates between this and 1
    int burst_min_hold{12};          // burst level hold time, in steps
    int burst_max_hold{20};
    std::vector<CriticalWindow> critical_windows{{60, 120}, {600, 120}, {1450, 120}, {2040, 120}};

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

struct TraceSample {
    int t{};
    double load{};                               // in [0, 1]
    std::array<double, kKpiChannels> kpis{};     // each in [0, 1]
    int hour_of_day{};
    int day_of_week{};
    bool is_weekend{};
    bool is_peak{};
    bool is_critical_event{};
};

struct TraceSeries {
    std::vector<TraceSample> samples;
    std::uint64_t seed{};
    std::string scenario_id;

    int size() const { return static_cast<int>(samples.size()); }
};

/// Deterministic per (cfg, seed): load(t) = clip(base + diurnal + weekly +
/// peak + surge + noise, 0, 1). KPI channels are gain/offset correlates of
/// the clean (pre-noise) load, each with its own small time shift and noise.
TraceSeries generate_trace(const TraceConfig& cfg, std::uint64_t seed);

using FeatureVector = std::vector<double>;

/// Model input layouts, nested by prefix:
///   6: load, sin(2*pi*hour/24), cos(2*pi*hour/24), day_of_week/6, weekend, peak
///   8: + KPI channels 1-2,  10: + KPI channels 3-4,  16: + KPI channels 5-10
/// Unsupported d_x throws ConfigError listing the supported sizes.
FeatureVector extract_features(const TraceSeries& series, int index, int d_x);

/// Borrowed view of one row-major window; cols may be a prefix of the
/// stored feature width (stride stays the full width).
struct WindowView {
    const double* data{};
    int rows{};
    int cols{};
    int stride{};

    const double* row(int r) const { return data + static_cast<std::size_t>(r) * stride; }
};

struct WindowedDataset {
    std::vector<std::vector<double>> inputs;  // each row-major window_len x d_x
    std::vector<double> targets;              // load at the step after the window
    std::vector<Regime> labels;               // regime of the target step
    int window_len{};
    int d_x{};

    int size() const { return static_cast<int>(targets.size()); }

    /// View of example i, optionally narrowed to the first d_sub features.
    WindowView window(int i, int d_sub = 0) const;
};

/// Examples i = 0 .. |series|-W-1: inputs cover [i, i+W), target is load(i+W),
/// label is Critical iff the target step lies in a critical window.
/// Throws ConfigError if the series is shorter than W+1 (message states the
/// minimum) or d_x is unsupported.
WindowedDataset window_dataset(const TraceSeries& series, int window_len, int d_x);

/// Copy of examples [first, first+count) of ds.
WindowedDataset dataset_slice(const WindowedDataset& ds, int first, int count);

/// CSV exchange format. Header:
///   t,load,hour,dow,weekend,peak,critical,kpi0..kpi11
/// load and KPI values carry 9 decimal digits.
void write_trace_csv(const TraceSeries& series, const std::string& path);
TraceSeries read_trace_csv(const std::string& path);

}  // namespace ranlstm
