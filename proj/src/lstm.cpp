#include "ranlstm/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <thread>
#include <unordered_set>

#include "ranlstm/rng.hpp"

namespace ranlstm {

namespace {

// Dot product with four explicit accumulators: the reassociation is spelled
// out in the source, so the result is deterministic and the loop still
// vectorises.
double dot(const double* a, const double* b, int n) {
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        s0 += a[i] * b[i];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
    }
    double s = (s0 + s1) + (s2 + s3);
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

// y += M x, M row-major rows x cols
void matvec_add(double* y, const double* m, const double* x, int rows, int cols) {
    for (int r = 0; r < rows; ++r) y[r] += dot(m + static_cast<std::size_t>(r) * cols, x, cols);
}

// G += a x^T (outer product), G row-major rows x cols
void ger(double* g, const double* a, const double* x, int rows, int cols) {
    for (int r = 0; r < rows; ++r) {
        double* row = g + static_cast<std::size_t>(r) * cols;
        const double ar = a[r];
        for (int j = 0; j < cols; ++j) row[j] += ar * x[j];
    }
}

// y += M^T a, M row-major rows x cols, y has cols entries
void mat_t_vec_add(double* y, const double* m, const double* a, int rows, int cols) {
    for (int r = 0; r < rows; ++r) {
        const double* row = m + static_cast<std::size_t>(r) * cols;
        const double ar = a[r];
        for (int j = 0; j < cols; ++j) y[j] += ar * row[j];
    }
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

constexpr int kGrainChunk = 8;  // gradient accumulation chunk, fixes summation order

}  // namespace

void ArchSpec::validate() const {
    if (name.empty()) throw ConfigError("name: must not be empty");
    if (hidden_dims.empty() || hidden_dims.size() > 3)
        throw ConfigError("hidden_dims: need 1 to 3 layers, got " +
                          std::to_string(hidden_dims.size()));
    for (int d : hidden_dims)
        if (d < 1) throw ConfigError("hidden_dims: layer width must be positive, got " +
                                     std::to_string(d));
    if (std::find(kFeatureSizes.begin(), kFeatureSizes.end(), d_x) == kFeatureSizes.end())
        throw ConfigError("d_x: unsupported feature size " + std::to_string(d_x) +
                          " (supported: 6, 8, 10, 16)");
    if (window_len < 1) throw ConfigError("window_len: must be at least 1");
}

std::int64_t param_count(const ArchSpec& spec, bool include_head) {
    spec.validate();
    std::int64_t total = 0;
    std::int64_t d_in = spec.d_x;
    for (int d_h : spec.hidden_dims) {
        total += 4 * (d_in * static_cast<std::int64_t>(d_h) +
                      static_cast<std::int64_t>(d_h) * d_h + d_h);
        d_in = d_h;
    }
    if (include_head) total += spec.hidden_dims.back() + 1;
    return total;
}

ParamLayout ParamLayout::build(const ArchSpec& spec) {
    ParamLayout layout;
    std::size_t off = 0;
    std::size_t d_in = static_cast<std::size_t>(spec.d_x);
    for (int dim : spec.hidden_dims) {
        const std::size_t d_h = static_cast<std::size_t>(dim);
        std::array<GateBlock, 4> gates{};
        for (auto& g : gates) {
            g.w = off;
            off += d_h * d_in;
            g.u = off;
            off += d_h * d_h;
            g.b = off;
            off += d_h;
        }
        layout.layers.push_back(gates);
        d_in = d_h;
    }
    layout.head_w = off;
    off += static_cast<std::size_t>(spec.hidden_dims.back());
    layout.head_b = off;
    off += 1;
    layout.total = off;
    return layout;
}

LstmModel::LstmModel(ArchSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    layout_ = ParamLayout::build(spec_);
    params_.assign(layout_.total, 0.0);
}

std::span<double> LstmModel::w(int layer, Gate g) {
    const auto& blk = layout_.layers[static_cast<std::size_t>(layer)][static_cast<int>(g)];
    const std::size_t n = static_cast<std::size_t>(spec_.hidden_dims[static_cast<std::size_t>(layer)]) *
                          static_cast<std::size_t>(layer_input_dim(layer));
    return {params_.data() + blk.w, n};
}

std::span<double> LstmModel::u(int layer, Gate g) {
    const auto& blk = layout_.layers[static_cast<std::size_t>(layer)][static_cast<int>(g)];
    const std::size_t d = static_cast<std::size_t>(spec_.hidden_dims[static_cast<std::size_t>(layer)]);
    return {params_.data() + blk.u, d * d};
}

std::span<double> LstmModel::b(int layer, Gate g) {
    const auto& blk = layout_.layers[static_cast<std::size_t>(layer)][static_cast<int>(g)];
    const std::size_t d = static_cast<std::size_t>(spec_.hidden_dims[static_cast<std::size_t>(layer)]);
    return {params_.data() + blk.b, d};
}

std::span<const double> LstmModel::w(int layer, Gate g) const {
    return const_cast<LstmModel*>(this)->w(layer, g);
}
std::span<const double> LstmModel::u(int layer, Gate g) const {
    return const_cast<LstmModel*>(this)->u(layer, g);
}
std::span<const double> LstmModel::b(int layer, Gate g) const {
    return const_cast<LstmModel*>(this)->b(layer, g);
}

std::span<double> LstmModel::head_w() {
    return {params_.data() + layout_.head_w,
            static_cast<std::size_t>(spec_.hidden_dims.back())};
}
std::span<const double> LstmModel::head_w() const {
    return const_cast<LstmModel*>(this)->head_w();
}

LstmModel init_model(const ArchSpec& spec, std::uint64_t seed) {
    LstmModel model(spec);
    model.seed = seed;
    Rng rng(seed);
    const int layers = static_cast<int>(spec.hidden_dims.size());
    // Draw order: layers ascending, gates in (input, forget, output,
    // candidate) order, W before U. Biases consume no draws.
    for (int l = 0; l < layers; ++l) {
        const double sw = 1.0 / std::sqrt(static_cast<double>(model.layer_input_dim(l)));
        const double su = 1.0 / std::sqrt(static_cast<double>(spec.hidden_dims[static_cast<std::size_t>(l)]));
        for (Gate g : {Gate::Input, Gate::Forget, Gate::Output, Gate::Candidate}) {
            for (double& v : model.w(l, g)) v = rng.uniform(-sw, sw);
            for (double& v : model.u(l, g)) v = rng.uniform(-su, su);
            const double bias = g == Gate::Forget ? 1.0 : 0.0;
            for (double& v : model.b(l, g)) v = bias;
        }
    }
    const double sh = 1.0 / std::sqrt(static_cast<double>(spec.hidden_dims.back()));
    for (double& v : model.head_w()) v = rng.uniform(-sh, sh);
    model.head_b() = 0.0;
    return model;
}

void Workspace::prepare(const ArchSpec& spec) {
    const std::size_t layers = spec.hidden_dims.size();
    const std::size_t w_len = static_cast<std::size_t>(spec.window_len);
    auto size_per_layer = [&](std::vector<std::vector<double>>& v) {
        v.resize(layers);
        for (std::size_t l = 0; l < layers; ++l)
            v[l].resize(w_len * static_cast<std::size_t>(spec.hidden_dims[l]));
    };
    size_per_layer(gate_i);
    size_per_layer(gate_f);
    size_per_layer(gate_o);
    size_per_layer(gate_g);
    size_per_layer(cell);
    size_per_layer(hidden);
    size_per_layer(dstream);
    std::size_t max_dh = 0;
    for (int d : spec.hidden_dims) max_dh = std::max(max_dh, static_cast<std::size_t>(d));
    dh.resize(max_dh);
    dc.resize(max_dh);
    dh_next.resize(max_dh);
    dc_next.resize(max_dh);
    da.resize(4 * max_dh);
    zeros.assign(max_dh, 0.0);
}

namespace {

void check_window_shape(const ArchSpec& spec, WindowView win) {
    if (win.rows != spec.window_len || win.cols != spec.d_x)
        throw std::invalid_argument(
            "window shape mismatch: expected " + std::to_string(spec.window_len) + "x" +
            std::to_string(spec.d_x) + ", got " + std::to_string(win.rows) + "x" +
            std::to_string(win.cols));
}

// Runs the recurrence and fills the workspace history arrays.
double run_forward(const LstmModel& model, WindowView win, Workspace& ws) {
    check_window_shape(model.spec(), win);
    ws.prepare(model.spec());
    const ArchSpec& spec = model.spec();
    const int layers = static_cast<int>(spec.hidden_dims.size());
    const int w_len = spec.window_len;

    for (int t = 0; t < w_len; ++t) {
        const double* x = win.row(t);
        for (int l = 0; l < layers; ++l) {
            const int d_h = spec.hidden_dims[static_cast<std::size_t>(l)];
            const int d_in = model.layer_input_dim(l);
            const std::size_t at = static_cast<std::size_t>(t) * d_h;
            const double* h_prev = t > 0 ? ws.hidden[l].data() + at - d_h : ws.zeros.data();
            const double* c_prev = t > 0 ? ws.cell[l].data() + at - d_h : ws.zeros.data();

            double* pre = ws.da.data();  // 4 gate pre-activations
            for (int g = 0; g < 4; ++g) {
                const Gate gate = static_cast<Gate>(g);
                double* a = pre + static_cast<std::size_t>(g) * d_h;
                std::memcpy(a, model.b(l, gate).data(), sizeof(double) * static_cast<std::size_t>(d_h));
                matvec_add(a, model.w(l, gate).data(), x, d_h, d_in);
                matvec_add(a, model.u(l, gate).data(), h_prev, d_h, d_h);
            }
            double* gi = ws.gate_i[l].data() + at;
            double* gf = ws.gate_f[l].data() + at;
            double* go = ws.gate_o[l].data() + at;
            double* gg = ws.gate_g[l].data() + at;
            double* c = ws.cell[l].data() + at;
            double* h = ws.hidden[l].data() + at;
            for (int j = 0; j < d_h; ++j) {
                gi[j] = sigmoid(pre[j]);
                gf[j] = sigmoid(pre[d_h + j]);
                go[j] = sigmoid(pre[2 * d_h + j]);
                gg[j] = std::tanh(pre[3 * d_h + j]);
                c[j] = gf[j] * c_prev[j] + gi[j] * gg[j];
                h[j] = go[j] * std::tanh(c[j]);
            }
            x = h;
        }
    }
    const int d_top = spec.hidden_dims.back();
    const double* h_last =
        ws.hidden[static_cast<std::size_t>(layers - 1)].data() +
        static_cast<std::size_t>(w_len - 1) * d_top;
    return dot(model.head_w().data(), h_last, d_top) + model.head_b();
}

}  // namespace

double forward(const LstmModel& model, WindowView window, Workspace& ws) {
    return run_forward(model, window, ws);
}

double forward(const LstmModel& model, WindowView window) {
    Workspace ws;
    return run_forward(model, window, ws);
}

double accumulate_gradient(const LstmModel& model, WindowView win, double target,
                           std::span<double> grad, Workspace& ws) {
    const ArchSpec& spec = model.spec();
    const ParamLayout& layout = model.layout();
    if (grad.size() != layout.total)
        throw std::invalid_argument("gradient buffer size " + std::to_string(grad.size()) +
                                    ", model has " + std::to_string(layout.total) +
                                    " parameters");
    const double pred = run_forward(model, win, ws);
    const int layers = static_cast<int>(spec.hidden_dims.size());
    const int w_len = spec.window_len;
    const int d_top = spec.hidden_dims.back();

    const double dpred = 2.0 * (pred - target);

    for (auto& v : ws.dstream)
        std::fill(v.begin(), v.end(), 0.0);

    // head
    const double* h_last = ws.hidden[static_cast<std::size_t>(layers - 1)].data() +
                           static_cast<std::size_t>(w_len - 1) * d_top;
    double* g_head = grad.data() + layout.head_w;
    for (int j = 0; j < d_top; ++j) g_head[j] += dpred * h_last[j];
    grad[layout.head_b] += dpred;
    {
        double* seed = ws.dstream[static_cast<std::size_t>(layers - 1)].data() +
                       static_cast<std::size_t>(w_len - 1) * d_top;
        const double* hw = model.head_w().data();
        for (int j = 0; j < d_top; ++j) seed[j] += dpred * hw[j];
    }

    for (int l = layers - 1; l >= 0; --l) {
        const int d_h = spec.hidden_dims[static_cast<std::size_t>(l)];
        const int d_in = model.layer_input_dim(l);
        std::fill_n(ws.dh_next.begin(), d_h, 0.0);
        std::fill_n(ws.dc_next.begin(), d_h, 0.0);

        for (int t = w_len - 1; t >= 0; --t) {
            const std::size_t at = static_cast<std::size_t>(t) * d_h;
            const double* gi = ws.gate_i[l].data() + at;
            const double* gf = ws.gate_f[l].data() + at;
            const double* go = ws.gate_o[l].data() + at;
            const double* gg = ws.gate_g[l].data() + at;
            const double* c = ws.cell[l].data() + at;
            const double* c_prev = t > 0 ? ws.cell[l].data() + at - d_h : ws.zeros.data();
            const double* h_prev = t > 0 ? ws.hidden[l].data() + at - d_h : ws.zeros.data();
            const double* x = l > 0 ? ws.hidden[static_cast<std::size_t>(l - 1)].data() +
                                          static_cast<std::size_t>(t) * d_in
                                    : win.row(t);

            double* da_i = ws.da.data();
            double* da_f = da_i + d_h;
            double* da_o = da_f + d_h;
            double* da_g = da_o + d_h;
            const double* dstream_t = ws.dstream[static_cast<std::size_t>(l)].data() + at;
            for (int j = 0; j < d_h; ++j) {
                const double dh_j = dstream_t[j] + ws.dh_next[j];
                const double tc = std::tanh(c[j]);
                double dc_j = ws.dc_next[j] + dh_j * go[j] * (1.0 - tc * tc);
                da_o[j] = dh_j * tc * go[j] * (1.0 - go[j]);
                da_i[j] = dc_j * gg[j] * gi[j] * (1.0 - gi[j]);
                da_f[j] = dc_j * c_prev[j] * gf[j] * (1.0 - gf[j]);
                da_g[j] = dc_j * gi[j] * (1.0 - gg[j] * gg[j]);
                ws.dc_next[j] = dc_j * gf[j];
            }

            std::fill_n(ws.dh_next.begin(), d_h, 0.0);
            double* dx = l > 0 ? ws.dstream[static_cast<std::size_t>(l - 1)].data() +
                                     static_cast<std::size_t>(t) * d_in
                               : nullptr;
            const auto& blocks = layout.layers[static_cast<std::size_t>(l)];
            const double* da_all[4] = {da_i, da_f, da_o, da_g};
            for (int g = 0; g < 4; ++g) {
                const Gate gate = static_cast<Gate>(g);
                const double* da = da_all[g];
                ger(grad.data() + blocks[g].w, da, x, d_h, d_in);
                ger(grad.data() + blocks[g].u, da, h_prev, d_h, d_h);
                double* gb = grad.data() + blocks[g].b;
                for (int j = 0; j < d_h; ++j) gb[j] += da[j];
                if (dx) mat_t_vec_add(dx, model.w(l, gate).data(), da, d_h, d_in);
                mat_t_vec_add(ws.dh_next.data(), model.u(l, gate).data(), da, d_h, d_h);
            }
        }
    }
    return pred;
}

double dataset_loss(const LstmModel& model, const WindowedDataset& ds, int first, int count) {
    if (count < 0) count = ds.size() - first;
    if (first < 0 || count < 1 || first + count > ds.size())
        throw std::invalid_argument("dataset_loss: bad range [" + std::to_string(first) + ", " +
                                    std::to_string(first + count) + ") for dataset of size " +
                                    std::to_string(ds.size()));
    Workspace ws;
    double sum = 0.0;
    for (int i = first; i < first + count; ++i) {
        const double pred = run_forward(model, ds.window(i, model.spec().d_x), ws);
        const double err = pred - ds.targets[static_cast<std::size_t>(i)];
        sum += err * err;
    }
    return sum / count;
}

void TrainConfig::validate() const {
    if (epochs < 0) throw ConfigError("epochs: must be non-negative");
    if (batch_size < 1) throw ConfigError("batch_size: must be positive");
    if (learning_rate < 0.0) throw ConfigError("learning_rate: must be non-negative");
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
        throw ConfigError("validation_fraction: must lie strictly between 0 and 1");
    if (adam_beta1 < 0.0 || adam_beta1 >= 1.0) throw ConfigError("adam_beta1: must be in [0, 1)");
    if (adam_beta2 < 0.0 || adam_beta2 >= 1.0) throw ConfigError("adam_beta2: must be in [0, 1)");
    if (adam_eps <= 0.0) throw ConfigError("adam_eps: must be positive");
    if (workers < 1) throw ConfigError("workers: must be at least 1");
}

namespace {

struct ChunkBuffer {
    std::vector<double> grad;
    double loss_sum{};
    Workspace ws;
};

// Runs fn(k) for k in [0, n); the buffers written by distinct k never alias,
// so scheduling cannot change results.
void run_tasks(int n, int workers, const std::function<void(int)>& fn) {
    if (workers <= 1 || n <= 1) {
        for (int k = 0; k < n; ++k) fn(k);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) threads.emplace_back(fn, k);
    for (auto& t : threads) t.join();
}

double run_loss(const LstmModel& model, WindowView win, double target, Workspace& ws) {
    const double err = run_forward(model, win, ws) - target;
    return err * err;
}

}  // namespace

TrainHistory train(LstmModel& model, const WindowedDataset& ds, const TrainConfig& cfg) {
    cfg.validate();
    const ArchSpec& spec = model.spec();
    if (ds.window_len != spec.window_len)
        throw std::invalid_argument("dataset window_len " + std::to_string(ds.window_len) +
                                    " does not match model window_len " +
                                    std::to_string(spec.window_len));
    if (ds.d_x < spec.d_x)
        throw std::invalid_argument("dataset carries " + std::to_string(ds.d_x) +
                                    " features, model needs " + std::to_string(spec.d_x));
    const int n = ds.size();
    if (n < 2) throw std::invalid_argument("training needs at least 2 examples, got " +
                                           std::to_string(n));
    int n_val = static_cast<int>(std::lround(n * cfg.validation_fraction));
    n_val = std::clamp(n_val, 1, n - 1);
    const int n_train = n - n_val;

    const std::size_t total = model.layout().total;
    const int wave = std::max(1, std::min(cfg.workers, 8));
    std::vector<ChunkBuffer> buffers(static_cast<std::size_t>(wave));
    for (auto& b : buffers) b.grad.assign(total, 0.0);

    std::vector<double> g_mean(total);
    std::vector<double> adam_m, adam_v;
    if (cfg.optimizer == TrainConfig::Optimizer::Adam) {
        adam_m.assign(total, 0.0);
        adam_v.assign(total, 0.0);
    }

    TrainHistory history;
    history.initial_train_loss = dataset_loss(model, ds, 0, n_train);
    history.initial_val_loss = dataset_loss(model, ds, n_train, n_val);

    Rng rng(cfg.seed);
    std::vector<int> order(static_cast<std::size_t>(n_train));
    for (int i = 0; i < n_train; ++i) order[static_cast<std::size_t>(i)] = i;

    double beta1_t = 1.0, beta2_t = 1.0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss_sum = 0.0;
        int batch_index = 0;
        for (int b0 = 0; b0 < n_train; b0 += cfg.batch_size, ++batch_index) {
            const int batch_n = std::min(cfg.batch_size, n_train - b0);
            const int n_chunks = (batch_n + kGrainChunk - 1) / kGrainChunk;

            double batch_loss_sum = 0.0;
            std::fill(g_mean.begin(), g_mean.end(), 0.0);
            for (int c0 = 0; c0 < n_chunks; c0 += wave) {
                const int cw = std::min(wave, n_chunks - c0);
                run_tasks(cw, cfg.workers, [&](int k) {
                    ChunkBuffer& buf = buffers[static_cast<std::size_t>(k)];
                    std::fill(buf.grad.begin(), buf.grad.end(), 0.0);
                    buf.loss_sum = 0.0;
                    const int chunk = c0 + k;
                    const int lo = chunk * kGrainChunk;
                    const int hi = std::min(lo + kGrainChunk, batch_n);
                    for (int j = lo; j < hi; ++j) {
                        const int idx = order[static_cast<std::size_t>(b0 + j)];
                        const double y = ds.targets[static_cast<std::size_t>(idx)];
                        const double pred = accumulate_gradient(
                            model, ds.window(idx, spec.d_x), y, buf.grad, buf.ws);
                        const double err = pred - y;
                        buf.loss_sum += err * err;
                    }
                });
                // combine partials in chunk order; grouping is independent of
                // wave size because += over the running total is associative
                // in program order
                for (int k = 0; k < cw; ++k) {
                    const ChunkBuffer& buf = buffers[static_cast<std::size_t>(k)];
                    for (std::size_t i = 0; i < total; ++i) g_mean[i] += buf.grad[i];
                    batch_loss_sum += buf.loss_sum;
                }
            }

            const double batch_loss = batch_loss_sum / batch_n;
            if (!std::isfinite(batch_loss))
                throw TrainingError("non-finite training loss at epoch " +
                                    std::to_string(epoch + 1) + ", batch " +
                                    std::to_string(batch_index + 1));
            epoch_loss_sum += batch_loss_sum;

            const double inv_n = 1.0 / batch_n;
            for (double& g : g_mean) g *= inv_n;

            double norm_sq = 0.0;
            for (double g : g_mean) norm_sq += g * g;
            if (!std::isfinite(norm_sq))
                throw TrainingError("non-finite gradient at epoch " + std::to_string(epoch + 1) +
                                    ", batch " + std::to_string(batch_index + 1));
            if (cfg.clip_norm > 0.0) {
                const double norm = std::sqrt(norm_sq);
                if (norm > cfg.clip_norm) {
                    const double scale = cfg.clip_norm / norm;
                    for (double& g : g_mean) g *= scale;
                }
            }

            double* p = model.params().data();
            if (cfg.optimizer == TrainConfig::Optimizer::Adam) {
                beta1_t *= cfg.adam_beta1;
                beta2_t *= cfg.adam_beta2;
                const double corr1 = 1.0 - beta1_t;
                const double corr2 = 1.0 - beta2_t;
                for (std::size_t i = 0; i < total; ++i) {
                    adam_m[i] = cfg.adam_beta1 * adam_m[i] + (1.0 - cfg.adam_beta1) * g_mean[i];
                    adam_v[i] = cfg.adam_beta2 * adam_v[i] +
                                (1.0 - cfg.adam_beta2) * g_mean[i] * g_mean[i];
                    const double m_hat = adam_m[i] / corr1;
                    const double v_hat = adam_v[i] / corr2;
                    p[i] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_eps);
                }
            } else {
                for (std::size_t i = 0; i < total; ++i) p[i] -= cfg.learning_rate * g_mean[i];
            }
        }

        history.train_loss.push_back(epoch_loss_sum / n_train);
        const double val = dataset_loss(model, ds, n_train, n_val);
        if (!std::isfinite(val))
            throw TrainingError("non-finite validation loss after epoch " +
                                std::to_string(epoch + 1));
        history.val_loss.push_back(val);
    }
    model.trained_epochs += cfg.epochs;
    return history;
}

GradCheckResult grad_check(const LstmModel& model, WindowView window, double target,
                           double epsilon, std::size_t sample_cap, std::uint64_t seed) {
    if (epsilon <= 0.0) throw std::invalid_argument("epsilon must be positive");
    const std::size_t total = model.layout().total;

    std::vector<double> analytic(total, 0.0);
    Workspace ws;
    accumulate_gradient(model, window, target, analytic, ws);

    std::vector<std::size_t> indices;
    if (sample_cap == 0 || total <= sample_cap) {
        indices.resize(total);
        for (std::size_t i = 0; i < total; ++i) indices[i] = i;
    } else {
        Rng rng(seed);
        std::unordered_set<std::size_t> seen;
        while (seen.size() < sample_cap)
            seen.insert(static_cast<std::size_t>(rng.below(total)));
        indices.assign(seen.begin(), seen.end());
        std::sort(indices.begin(), indices.end());
    }

    LstmModel probe = model;
    GradCheckResult result;
    for (std::size_t idx : indices) {
        double& p = probe.params()[idx];
        const double orig = p;
        p = orig + epsilon;
        const double up = run_loss(probe, window, target, ws);
        p = orig - epsilon;
        const double down = run_loss(probe, window, target, ws);
        p = orig;
        const double numeric = (up - down) / (2.0 * epsilon);
        const double ga = analytic[idx];
        if (ga == 0.0 && numeric == 0.0) {
            ++result.skipped;
            continue;
        }
        const double denom = std::max(std::max(std::abs(ga), std::abs(numeric)), 1e-6);
        result.max_rel_error = std::max(result.max_rel_error, std::abs(ga - numeric) / denom);
        ++result.checked;
    }
    return result;
}

}  // namespace ranlstm
