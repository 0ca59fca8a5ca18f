#include "ranlstm/metrics.hpp"

#include <cmath>
#include <vector>

namespace ranlstm {

namespace {

void check_pair(std::span<const double> predicted, std::span<const double> actual) {
    if (predicted.empty() || actual.empty())
        throw std::invalid_argument("metrics need at least one (predicted, actual) pair");
    if (predicted.size() != actual.size())
        throw std::invalid_argument("length mismatch: " + std::to_string(predicted.size()) +
                                    " predictions vs " + std::to_string(actual.size()) +
                                    " actuals");
}

}  // namespace

double mae(std::span<const double> predicted, std::span<const double> actual) {
    check_pair(predicted, actual);
    double sum = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) sum += std::abs(predicted[i] - actual[i]);
    return sum / static_cast<double>(predicted.size());
}

double rmse(std::span<const double> predicted, std::span<const double> actual) {
    check_pair(predicted, actual);
    double sum = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        const double d = predicted[i] - actual[i];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(predicted.size()));
}

double mape(std::span<const double> predicted, std::span<const double> actual, double floor) {
    check_pair(predicted, actual);
    if (floor <= 0.0) throw std::invalid_argument("mape floor must be positive");
    double sum = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i)
        sum += std::abs(predicted[i] - actual[i]) / std::max(std::abs(actual[i]), floor);
    return 100.0 * sum / static_cast<double>(predicted.size());
}

double r2(std::span<const double> predicted, std::span<const double> actual) {
    check_pair(predicted, actual);
    double mean = 0.0;
    for (double a : actual) mean += a;
    mean /= static_cast<double>(actual.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double r = predicted[i] - actual[i];
        const double d = actual[i] - mean;
        ss_res += r * r;
        ss_tot += d * d;
    }
    if (ss_tot == 0.0)
        throw std::domain_error("r2 undefined: actual series has zero variance");
    return 1.0 - ss_res / ss_tot;
}

EvalReport evaluate_predictions(std::span<const double> predicted,
                                std::span<const double> actual,
                                std::span<const Regime> labels) {
    check_pair(predicted, actual);
    if (labels.size() != actual.size())
        throw std::invalid_argument("length mismatch: " + std::to_string(labels.size()) +
                                    " labels vs " + std::to_string(actual.size()) + " actuals");

    EvalReport report;
    report.mae = mae(predicted, actual);
    report.rmse = rmse(predicted, actual);
    report.mape_percent = mape(predicted, actual);
    report.r2_overall = r2(predicted, actual);

    auto subset_r2 = [&](Regime regime, int& count) -> std::optional<double> {
        std::vector<double> p, a;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] != regime) continue;
            p.push_back(predicted[i]);
            a.push_back(actual[i]);
        }
        count = static_cast<int>(a.size());
        if (a.size() < 2) return std::nullopt;
        try {
            return r2(p, a);
        } catch (const std::domain_error&) {
            return std::nullopt;  // constant subset: score undefined, not zero
        }
    };
    report.r2_regular = subset_r2(Regime::Regular, report.n_regular);
    report.r2_critical = subset_r2(Regime::Critical, report.n_critical);
    return report;
}

EvalReport evaluate(const LstmModel& model, const WindowedDataset& ds) {
    if (ds.size() < 2)
        throw std::invalid_argument("evaluate needs at least 2 examples, got " +
                                    std::to_string(ds.size()));
    std::vector<double> preds;
    preds.reserve(static_cast<std::size_t>(ds.size()));
    Workspace ws;
    for (int i = 0; i < ds.size(); ++i)
        preds.push_back(forward(model, ds.window(i, model.spec().d_x), ws));
    EvalReport report = evaluate_predictions(preds, ds.targets, ds.labels);
    report.arch = model.spec().name;
    report.param_count = param_count(model.spec(), true);
    return report;
}

}  // namespace ranlstm
