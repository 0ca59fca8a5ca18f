#pragma once

// Regression accuracy metrics and the per-model evaluation report used by
// the architecture search and the simulation.

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "ranlstm/lstm.hpp"
#include "ranlstm/types.hpp"

namespace ranlstm {

/// All metric functions require equally sized, non-empty inputs and throw
/// std::invalid_argument otherwise.
double mae(std::span<const double> predicted, std::span<const double> actual);
double rmse(std::span<const double> predicted, std::span<const double> actual);

/// Mean absolute percentage error in percent; each denominator is floored at
/// `floor` so near-zero actuals cannot blow up the mean.
double mape(std::span<const double> predicted, std::span<const double> actual,
            double floor = 1e-3);

/// Coefficient of determination, 1 - SS_res/SS_tot. Throws std::domain_error
/// when the actuals have zero variance (SS_tot == 0).
double r2(std::span<const double> predicted, std::span<const double> actual);

struct EvalReport {
    std::string arch;
    std::int64_t param_count{};  // nominal architecture size, head included
    double mae{};
    double rmse{};
    double mape_percent{};
    double r2_overall{};
    std::optional<double> r2_regular;   // absent when the subset cannot be scored
    std::optional<double> r2_critical;
    double efficiency{};                // filled by the architecture search
    int n_regular{};
    int n_critical{};
};

/// Builds a report from already-computed predictions. Per-regime R2 is
/// absent (not zero) for a regime with fewer than 2 examples or
/// zero-variance actuals; the overall R2 requirement (variance > 0) must
/// hold or std::domain_error propagates.
EvalReport evaluate_predictions(std::span<const double> predicted,
                                std::span<const double> actual,
                                std::span<const Regime> labels);

/// Runs the model over every example (features narrowed to the model's d_x)
/// and scores the result.
EvalReport evaluate(const LstmModel& model, const WindowedDataset& ds);

}  // namespace ranlstm
