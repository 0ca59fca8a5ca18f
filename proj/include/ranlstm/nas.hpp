#pragma once

// Offline architecture search over the fixed six-candidate space: train each
// candidate, score accuracy on a held-out split, and rank by the
// accuracy-per-complexity efficiency measure E = P * c_max / c.

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ranlstm/lstm.hpp"
#include "ranlstm/metrics.hpp"

namespace ranlstm {

/// The six candidates, in fixed order: Lightweight-32, Lightweight-64,
/// Balanced-Small, Balanced-Medium, Deep-Performance, Ultra-Performance.
std::vector<ArchSpec> candidate_space(int window_len = 24);

/// Nominal (unscaled, head included) parameter count of a candidate by name;
/// throws ConfigError for names outside the space.
std::int64_t nominal_param_count(const std::string& name);

/// Parameter counts the published accuracy table reports for each candidate;
/// four of them disagree with the recurrence-formula counts and are flagged
/// downstream.
std::int64_t published_param_count(const std::string& name);
bool params_match_published(const std::string& name);

/// E = p * c_max / c_lstm with p in [0, 1]. Throws ConfigError when
/// c_lstm <= 0, c_max <= 0, or c_lstm > c_max.
double efficiency_score(double p, std::int64_t c_lstm, std::int64_t c_max);

/// ceil(dim * scale) per layer, scale in (0, 1].
std::vector<int> scale_dims(const std::vector<int>& dims, double scale);

struct CandidateResult {
    ArchSpec spec;                  // nominal architecture
    std::vector<int> trained_dims;  // after scaling
    EvalReport report;
    std::int64_t c_lstm{};          // nominal count, head included
    double c_norm{};
    double efficiency{};
    double wall_time_s{};
    bool failed{};
    std::string failure_reason;
};

struct SearchOutcome {
    /// Non-failed candidates sorted by efficiency (ties: smaller c_lstm,
    /// then name), failed candidates after them.
    std::vector<CandidateResult> ranked;
    std::string selected_default;
    std::string selected_critical;
    bool default_met_threshold{true};
    std::uint64_t seed{};
    std::uint64_t dataset_fingerprint{};
    /// Trained models, keyed by candidate name. Not serialized.
    std::map<std::string, std::shared_ptr<const LstmModel>> models;
};

struct SearchConfig {
    TrainConfig train;
    double default_threshold{0.95};  // minimum r2_overall for selected_default
    double holdout_fraction{0.2};    // chronological tail used for scoring
    std::uint64_t seed{7};

    void validate() const;
};

/// In-place sort implementing the ranking order; exposed for property tests.
void rank_candidates(std::vector<CandidateResult>& results);

/// FNV-1a over the window bytes and targets; identifies the dataset a search
/// outcome was computed from.
std::uint64_t dataset_fingerprint(const WindowedDataset& ds);

/// Trains every candidate (hidden dims scaled, per-candidate seeds derived
/// from cfg.seed) on the leading split of ds, scores on the trailing holdout,
/// and ranks. ds must carry the full 16-feature layout so every candidate can
/// slice its own input width. Throws only if every candidate fails.
SearchOutcome run_search(const WindowedDataset& ds, const SearchConfig& cfg, double scale);

}  // namespace ranlstm
