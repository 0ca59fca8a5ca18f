#pragma once

// From-scratch stacked LSTM regressor in double precision: flat parameter
// storage with a fixed layout, truncated-window forward (state zeroed per
// window), full backpropagation through time, a deterministic mini-batch
// trainer, and central-difference gradient checking.

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ranlstm/traffic.hpp"
#include "ranlstm/types.hpp"

namespace ranlstm {

struct ArchSpec {
    std::string name;
    std::vector<int> hidden_dims;  // 1 to 3 layers
    int d_x{};                     // one of 6, 8, 10, 16
    int window_len{24};

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

/// Recurrent parameter complexity: sum over layers of
/// 4 * (d_in * d_h + d_h^2 + d_h); include_head adds d_h_last + 1 for the
/// linear readout.
std::int64_t param_count(const ArchSpec& spec, bool include_head);

/// Gate order inside the flat buffer and the checkpoint payload.
enum class Gate { Input = 0, Forget = 1, Output = 2, Candidate = 3 };

/// Offsets into the flat parameter buffer. Per layer, per gate:
/// W (d_h x d_in, row-major), U (d_h x d_h), b (d_h); afterwards the head
/// weights (d_h_last) and head bias.
struct ParamLayout {
    struct GateBlock {
        std::size_t w{}, u{}, b{};
    };
    std::vector<std::array<GateBlock, 4>> layers;
    std::size_t head_w{};
    std::size_t head_b{};
    std::size_t total{};

    static ParamLayout build(const ArchSpec& spec);
};

class LstmModel {
public:
    /// Zero-initialised parameters; use init_model for trainable weights.
    explicit LstmModel(ArchSpec spec);

    const ArchSpec& spec() const { return spec_; }
    const ParamLayout& layout() const { return layout_; }

    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }

    int layer_input_dim(int layer) const {
        return layer == 0 ? spec_.d_x : spec_.hidden_dims[static_cast<std::size_t>(layer - 1)];
    }

    std::span<double> w(int layer, Gate g);
    std::span<double> u(int layer, Gate g);
    std::span<double> b(int layer, Gate g);
    std::span<const double> w(int layer, Gate g) const;
    std::span<const double> u(int layer, Gate g) const;
    std::span<const double> b(int layer, Gate g) const;
    std::span<double> head_w();
    std::span<const double> head_w() const;
    double& head_b() { return params_[layout_.head_b]; }
    double head_b() const { return params_[layout_.head_b]; }

    std::uint64_t seed{};     // weight init seed, recorded for provenance
    int trained_epochs{};

private:
    ArchSpec spec_;
    ParamLayout layout_;
    std::vector<double> params_;
};

/// Uniform(-s, s) weights with s = 1/sqrt(fan_in); gate biases zero except
/// the forget gate at 1 (open at start of training). Deterministic per seed.
LstmModel init_model(const ArchSpec& spec, std::uint64_t seed);

/// Reusable per-call scratch; holds the activation history a backward pass
/// needs. One workspace per thread.
struct Workspace {
    // per layer, length window_len * d_h
    std::vector<std::vector<double>> gate_i, gate_f, gate_o, gate_g, cell, hidden;
    // backward scratch
    std::vector<std::vector<double>> dstream;  // per layer, window_len * d_h
    std::vector<double> dh, dc, dh_next, dc_next, da;
    std::vector<double> zeros;

    void prepare(const ArchSpec& spec);
};

/// One-step-ahead prediction for a single window. The window must match the
/// model (rows == window_len, cols == d_x); mismatch throws
/// std::invalid_argument naming both shapes. Hidden and cell state start at
/// zero for every window.
double forward(const LstmModel& model, WindowView window, Workspace& ws);
double forward(const LstmModel& model, WindowView window);

/// Mean of (prediction - target)^2 over examples [first, first+count) of ds,
/// narrowed to the model's d_x. count < 0 means "to the end".
double dataset_loss(const LstmModel& model, const WindowedDataset& ds, int first = 0,
                    int count = -1);

/// Adds d/dtheta of (prediction - target)^2 for one example into grad
/// (size = param_count with head). Returns the prediction.
double accumulate_gradient(const LstmModel& model, WindowView window, double target,
                           std::span<double> grad, Workspace& ws);

struct TrainConfig {
    int epochs{20};
    int batch_size{32};
    double learning_rate{1e-3};
    double clip_norm{1.0};  // global L2 clip; <= 0 disables clipping
    enum class Optimizer { Adam, Sgd };
    Optimizer optimizer{Optimizer::Adam};
    double adam_beta1{0.9};
    double adam_beta2{0.999};
    double adam_eps{1e-8};
    double validation_fraction{0.2};
    std::uint64_t seed{1};
    int workers{1};

    void validate() const;
};

struct TrainHistory {
    double initial_train_loss{};
    double initial_val_loss{};
    std::vector<double> train_loss;  // mean batch loss per epoch
    std::vector<double> val_loss;    // full validation loss after each epoch
};

/// Deterministic mini-batch training: chronological train/validation split,
/// seeded shuffle per epoch, fixed-order gradient accumulation (chunk size 8,
/// chunks combined in index order, so results do not depend on the worker
/// count). A non-finite batch loss aborts with TrainingError naming epoch
/// and batch.
TrainHistory train(LstmModel& model, const WindowedDataset& ds, const TrainConfig& cfg);

struct GradCheckResult {
    double max_rel_error{};
    std::size_t checked{};
    std::size_t skipped{};  // entries whose analytic and numeric gradient are exactly zero
};

/// Central differences on every parameter, or on a seeded subsample of
/// sample_cap parameters when the model is larger than the cap (0 = no cap).
/// Relative error uses max(|analytic|, |numeric|) floored at 1e-6 so that
/// finite-difference noise on near-zero gradients is not amplified.
GradCheckResult grad_check(const LstmModel& model, WindowView window, double target,
                           double epsilon = 1e-5, std::size_t sample_cap = 0,
                           std::uint64_t seed = 1);

}  // namespace ranlstm
