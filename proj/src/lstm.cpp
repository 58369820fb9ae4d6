#include "windramp/lstm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "windramp/rng.hpp"

namespace windramp {

const char* to_string(FeatureSet f) {
    return f == FeatureSet::Univariate ? "Univariate" : "Multivariate";
}

namespace {

std::size_t wf_size(int input_dim, int hidden) {
    return static_cast<std::size_t>(hidden) * static_cast<std::size_t>(input_dim);
}
std::size_t uu_size(int hidden) {
    return static_cast<std::size_t>(hidden) * static_cast<std::size_t>(hidden);
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

} // namespace

std::size_t LSTMParams::parameter_count(int input_dim, int hidden) {
    return 4 * wf_size(input_dim, hidden) + 4 * uu_size(hidden) +
           4 * static_cast<std::size_t>(hidden) + static_cast<std::size_t>(hidden) + 1;
}

std::span<double> LSTMParams::block_w(int gate) {
    const std::size_t sz = wf_size(input_dim, hidden);
    return {theta.data() + static_cast<std::size_t>(gate) * sz, sz};
}
std::span<double> LSTMParams::block_u(int gate) {
    const std::size_t off = 4 * wf_size(input_dim, hidden);
    const std::size_t sz = uu_size(hidden);
    return {theta.data() + off + static_cast<std::size_t>(gate) * sz, sz};
}
std::span<double> LSTMParams::block_b(int gate) {
    const std::size_t off = 4 * wf_size(input_dim, hidden) + 4 * uu_size(hidden);
    const std::size_t sz = static_cast<std::size_t>(hidden);
    return {theta.data() + off + static_cast<std::size_t>(gate) * sz, sz};
}
std::span<double> LSTMParams::readout_w() {
    const std::size_t off =
        4 * wf_size(input_dim, hidden) + 4 * uu_size(hidden) + 4 * static_cast<std::size_t>(hidden);
    return {theta.data() + off, static_cast<std::size_t>(hidden)};
}
double& LSTMParams::readout_b() { return theta.back(); }

std::span<const double> LSTMParams::block_w(int gate) const {
    return const_cast<LSTMParams*>(this)->block_w(gate);
}
std::span<const double> LSTMParams::block_u(int gate) const {
    return const_cast<LSTMParams*>(this)->block_u(gate);
}
std::span<const double> LSTMParams::block_b(int gate) const {
    return const_cast<LSTMParams*>(this)->block_b(gate);
}
std::span<const double> LSTMParams::readout_w() const {
    return const_cast<LSTMParams*>(this)->readout_w();
}
double LSTMParams::readout_b() const { return theta.back(); }

std::span<const double> WindowedDataset::window(std::size_t i) const {
    const std::size_t sz = static_cast<std::size_t>(lags) * static_cast<std::size_t>(feature_count);
    return {inputs.data() + i * sz, sz};
}

WindowedDataset make_windows(std::span<const std::vector<std::optional<double>>> columns, int lags,
                             std::size_t target_column, const Scaler& scaler) {
    if (lags < 1) throw std::invalid_argument("make_windows: lags must be >= 1");
    if (columns.empty()) throw std::invalid_argument("make_windows: no feature columns");
    if (target_column >= columns.size())
        throw std::invalid_argument("make_windows: target column out of range");
    if (scaler.feature_count() != columns.size())
        throw std::invalid_argument("make_windows: scaler/feature count mismatch");
    const std::size_t n = columns[0].size();
    for (const auto& col : columns)
        if (col.size() != n) throw std::invalid_argument("make_windows: columns not aligned");
    if (n <= static_cast<std::size_t>(lags))
        throw std::invalid_argument("make_windows: series not longer than lags");

    std::vector<bool> row_ok(n, true);
    for (std::size_t r = 0; r < n; ++r)
        for (const auto& col : columns)
            if (!col[r].has_value()) {
                row_ok[r] = false;
                break;
            }

    WindowedDataset ds;
    ds.lags = lags;
    ds.feature_count = static_cast<int>(columns.size());
    ds.scaler = scaler;
    ds.target_feature = target_column;
    for (std::size_t i = 0; i + static_cast<std::size_t>(lags) < n; ++i) {
        const std::size_t target_row = i + static_cast<std::size_t>(lags);
        bool ok = row_ok[target_row];
        for (std::size_t r = i; r < target_row && ok; ++r) ok = row_ok[r];
        if (!ok) {
            ++ds.excluded_windows;
            continue;
        }
        for (std::size_t r = i; r < target_row; ++r)
            for (std::size_t f = 0; f < columns.size(); ++f)
                ds.inputs.push_back(scaler.apply(f, *columns[f][r]));
        ds.targets.push_back(scaler.apply(target_column, *columns[target_column][target_row]));
        ds.target_rows.push_back(target_row);
    }
    return ds;
}

LSTMParams init_params(const LSTMConfig& config, int input_dim) {
    if (input_dim < 1 || config.hidden_size < 1)
        throw std::invalid_argument("init_params: sizes must be positive");
    LSTMParams p;
    p.input_dim = input_dim;
    p.hidden = config.hidden_size;
    p.theta.assign(LSTMParams::parameter_count(input_dim, config.hidden_size), 0.0);

    Rng rng(config.seed);
    const double w_scale = 1.0 / std::sqrt(static_cast<double>(input_dim));
    const double u_scale = 1.0 / std::sqrt(static_cast<double>(config.hidden_size));
    for (int gate = 0; gate < 4; ++gate)
        for (double& v : p.block_w(gate)) v = rng.uniform(-w_scale, w_scale);
    for (int gate = 0; gate < 4; ++gate)
        for (double& v : p.block_u(gate)) v = rng.uniform(-u_scale, u_scale);
    for (double& v : p.block_b(1)) v = 1.0; // forget gate bias
    for (double& v : p.readout_w()) v = rng.uniform(-u_scale, u_scale);
    p.readout_b() = 0.0;
    return p;
}

namespace {
// Gate order used throughout: 0 = input, 1 = forget, 2 = output, 3 = candidate.
enum { kIn = 0, kForget = 1, kOut = 2, kCand = 3 };
} // namespace

double forward(const LSTMParams& params, std::span<const double> window, ForwardCache* cache) {
    const int hidden = params.hidden;
    const int fdim = params.input_dim;
    if (window.size() % static_cast<std::size_t>(fdim) != 0)
        throw std::invalid_argument("forward: window size not a multiple of input_dim");
    const int steps = static_cast<int>(window.size() / static_cast<std::size_t>(fdim));
    if (steps == 0) throw std::invalid_argument("forward: empty window");

    std::vector<double> h(static_cast<std::size_t>(hidden), 0.0);
    std::vector<double> c(static_cast<std::size_t>(hidden), 0.0);
    std::vector<double> gate_z(4 * static_cast<std::size_t>(hidden));

    if (cache) {
        cache->steps = steps;
        cache->x.assign(window.begin(), window.end());
        const std::size_t sh = static_cast<std::size_t>(steps) * static_cast<std::size_t>(hidden);
        cache->i.assign(sh, 0.0);
        cache->f.assign(sh, 0.0);
        cache->o.assign(sh, 0.0);
        cache->g.assign(sh, 0.0);
        cache->c.assign(sh, 0.0);
        cache->tanh_c.assign(sh, 0.0);
        cache->h.assign(sh, 0.0);
    }

    for (int t = 0; t < steps; ++t) {
        const double* x = window.data() + static_cast<std::size_t>(t) * static_cast<std::size_t>(fdim);
        for (int gate = 0; gate < 4; ++gate) {
            const auto w = params.block_w(gate);
            const auto u = params.block_u(gate);
            const auto b = params.block_b(gate);
            for (int r = 0; r < hidden; ++r) {
                double z = b[static_cast<std::size_t>(r)];
                const double* wr = w.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(fdim);
                for (int k = 0; k < fdim; ++k) z += wr[k] * x[k];
                const double* ur = u.data() + static_cast<std::size_t>(r) * static_cast<std::size_t>(hidden);
                for (int k = 0; k < hidden; ++k) z += ur[k] * h[static_cast<std::size_t>(k)];
                gate_z[static_cast<std::size_t>(gate) * static_cast<std::size_t>(hidden) +
                       static_cast<std::size_t>(r)] = z;
            }
        }
        for (int r = 0; r < hidden; ++r) {
            const std::size_t rr = static_cast<std::size_t>(r);
            const double iv = sigmoid(gate_z[static_cast<std::size_t>(kIn) * hidden + rr]);
            const double fv = sigmoid(gate_z[static_cast<std::size_t>(kForget) * hidden + rr]);
            const double ov = sigmoid(gate_z[static_cast<std::size_t>(kOut) * hidden + rr]);
            const double gv = std::tanh(gate_z[static_cast<std::size_t>(kCand) * hidden + rr]);
            const double cv = fv * c[rr] + iv * gv;
            const double tc = std::tanh(cv);
            const double hv = ov * tc;
            if (!std::isfinite(hv))
                throw std::runtime_error("forward: non-finite intermediate state");
            c[rr] = cv;
            h[rr] = hv;
            if (cache) {
                const std::size_t at = static_cast<std::size_t>(t) * static_cast<std::size_t>(hidden) + rr;
                cache->i[at] = iv;
                cache->f[at] = fv;
                cache->o[at] = ov;
                cache->g[at] = gv;
                cache->c[at] = cv;
                cache->tanh_c[at] = tc;
                cache->h[at] = hv;
            }
        }
    }

    const auto wy = params.readout_w();
    double y = params.readout_b();
    for (int r = 0; r < hidden; ++r) y += wy[static_cast<std::size_t>(r)] * h[static_cast<std::size_t>(r)];
    if (!std::isfinite(y)) throw std::runtime_error("forward: non-finite prediction");
    return y;
}

std::vector<double> gradients(const LSTMParams& params, const WindowedDataset& data,
                              std::size_t begin, std::size_t end, double* loss_out) {
    if (begin >= end || end > data.window_count())
        throw std::invalid_argument("gradients: empty or out-of-range batch");
    const int hidden = params.hidden;
    const int fdim = params.input_dim;
    const double batch = static_cast<double>(end - begin);

    std::vector<double> grad(params.theta.size(), 0.0);
    LSTMParams grad_view;
    grad_view.input_dim = fdim;
    grad_view.hidden = hidden;
    grad_view.theta.swap(grad);

    double loss = 0.0;
    ForwardCache cache;
    std::vector<double> dh(static_cast<std::size_t>(hidden));
    std::vector<double> dc(static_cast<std::size_t>(hidden));
    std::vector<double> dz(4 * static_cast<std::size_t>(hidden));

    for (std::size_t w = begin; w < end; ++w) {
        const double pred = forward(params, data.window(w), &cache);
        const double err = pred - data.targets[w];
        loss += err * err;
        const double dy = 2.0 * err / batch; // d(mean sq err)/d pred

        auto gy = grad_view.readout_w();
        const std::size_t last = static_cast<std::size_t>(cache.steps - 1) * hidden;
        for (int r = 0; r < hidden; ++r) {
            gy[static_cast<std::size_t>(r)] += dy * cache.h[last + static_cast<std::size_t>(r)];
            dh[static_cast<std::size_t>(r)] = dy * params.readout_w()[static_cast<std::size_t>(r)];
        }
        grad_view.readout_b() += dy;
        std::fill(dc.begin(), dc.end(), 0.0);

        for (int t = cache.steps - 1; t >= 0; --t) {
            const std::size_t at = static_cast<std::size_t>(t) * hidden;
            const double* x = cache.x.data() + static_cast<std::size_t>(t) * fdim;
            for (int r = 0; r < hidden; ++r) {
                const std::size_t rr = static_cast<std::size_t>(r);
                const double iv = cache.i[at + rr], fv = cache.f[at + rr], ov = cache.o[at + rr],
                             gv = cache.g[at + rr], tc = cache.tanh_c[at + rr];
                const double c_prev = t > 0 ? cache.c[at - hidden + rr] : 0.0;
                const double dov = dh[rr] * tc;
                const double dcv = dc[rr] + dh[rr] * ov * (1.0 - tc * tc);
                const double div = dcv * gv;
                const double dgv = dcv * iv;
                const double dfv = dcv * c_prev;
                dc[rr] = dcv * fv; // flows to c_{t-1}
                dz[static_cast<std::size_t>(kIn) * hidden + rr] = div * iv * (1.0 - iv);
                dz[static_cast<std::size_t>(kForget) * hidden + rr] = dfv * fv * (1.0 - fv);
                dz[static_cast<std::size_t>(kOut) * hidden + rr] = dov * ov * (1.0 - ov);
                dz[static_cast<std::size_t>(kCand) * hidden + rr] = dgv * (1.0 - gv * gv);
            }
            // Parameter accumulation and propagation to h_{t-1}.
            std::fill(dh.begin(), dh.end(), 0.0);
            for (int gate = 0; gate < 4; ++gate) {
                auto gw = grad_view.block_w(gate);
                auto gu = grad_view.block_u(gate);
                auto gb = grad_view.block_b(gate);
                const auto u = params.block_u(gate);
                const double* dzg = dz.data() + static_cast<std::size_t>(gate) * hidden;
                for (int r = 0; r < hidden; ++r) {
                    const double d = dzg[r];
                    if (d == 0.0) continue;
                    double* gwr = gw.data() + static_cast<std::size_t>(r) * fdim;
                    for (int k = 0; k < fdim; ++k) gwr[k] += d * x[k];
                    gb[static_cast<std::size_t>(r)] += d;
                    if (t > 0) {
                        const double* h_prev = cache.h.data() + (at - hidden);
                        double* gur = gu.data() + static_cast<std::size_t>(r) * hidden;
                        for (int k = 0; k < hidden; ++k) gur[k] += d * h_prev[k];
                    }
                    const double* ur = u.data() + static_cast<std::size_t>(r) * hidden;
                    for (int k = 0; k < hidden; ++k) dh[static_cast<std::size_t>(k)] += d * ur[k];
                }
            }
        }
    }
    if (loss_out) *loss_out = loss / batch;
    return std::move(grad_view.theta);
}

std::pair<LSTMParams, TrainHistory> train(const LSTMConfig& config, const WindowedDataset& data) {
    if (data.window_count() == 0) throw std::invalid_argument("train: empty dataset");
    if (config.epochs < 0 || config.batch_size < 1 || !(config.learning_rate > 0.0))
        throw std::invalid_argument("train: invalid config");

    const auto t_start = std::chrono::steady_clock::now();
    LSTMParams params = init_params(config, data.feature_count);
    const std::size_t dim = params.theta.size();
    std::vector<double> m(dim, 0.0), v(dim, 0.0);
    const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    long long step = 0;

    std::vector<std::size_t> order(data.window_count());
    std::iota(order.begin(), order.end(), 0);

    // A reindexed view for shuffled epochs; chronological order reuses data
    // directly so the default path stays allocation-free.
    WindowedDataset view;

    TrainHistory history;
    Rng shuffle_rng = Rng(config.seed).split(1);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        const WindowedDataset* source = &data;
        if (config.shuffle) {
            // Seeded Fisher-Yates permutation.
            std::iota(order.begin(), order.end(), 0);
            for (std::size_t i = order.size(); i > 1; --i)
                std::swap(order[i - 1], order[static_cast<std::size_t>(
                                            shuffle_rng.uniform_int(0, static_cast<std::int64_t>(i) - 1))]);
            view = data;
            view.inputs.clear();
            view.targets.clear();
            view.target_rows.clear();
            for (std::size_t idx : order) {
                const auto win = data.window(idx);
                view.inputs.insert(view.inputs.end(), win.begin(), win.end());
                view.targets.push_back(data.targets[idx]);
                view.target_rows.push_back(data.target_rows[idx]);
            }
            source = &view;
        }

        double sq_sum = 0.0;
        std::size_t count = 0;
        for (std::size_t b = 0; b < source->window_count(); b += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t e = std::min(source->window_count(),
                                           b + static_cast<std::size_t>(config.batch_size));
            double batch_loss = 0.0;
            const std::vector<double> grad = gradients(params, *source, b, e, &batch_loss);
            sq_sum += batch_loss * static_cast<double>(e - b);
            count += e - b;

            ++step;
            const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step));
            const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step));
            for (std::size_t k = 0; k < dim; ++k) {
                m[k] = beta1 * m[k] + (1.0 - beta1) * grad[k];
                v[k] = beta2 * v[k] + (1.0 - beta2) * grad[k] * grad[k];
                params.theta[k] -= config.learning_rate * (m[k] / bc1) / (std::sqrt(v[k] / bc2) + eps);
            }
        }
        const double epoch_loss = sq_sum / static_cast<double>(count);
        if (!std::isfinite(epoch_loss))
            throw std::runtime_error("train: loss diverged at epoch " + std::to_string(epoch));
        history.epoch_loss.push_back(epoch_loss);
    }
    history.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return {std::move(params), std::move(history)};
}

std::vector<double> predict(const LSTMParams& params, const WindowedDataset& data) {
    std::vector<double> out;
    out.reserve(data.window_count());
    for (std::size_t w = 0; w < data.window_count(); ++w) {
        const double scaled = forward(params, data.window(w));
        out.push_back(data.scaler.invert(data.target_feature, scaled));
    }
    return out;
}

std::string lstm_to_json(const LSTMModelFile& model) {
    nlohmann::json j;
    j["format"] = "windramp-model";
    j["version"] = 1;
    j["type"] = "lstm";
    j["config"] = {{"lags", model.config.lags},
                   {"hidden_size", model.config.hidden_size},
                   {"epochs", model.config.epochs},
                   {"learning_rate", model.config.learning_rate},
                   {"batch_size", model.config.batch_size},
                   {"seed", model.config.seed},
                   {"features", to_string(model.config.features)},
                   {"shuffle", model.config.shuffle}};
    j["input_dim"] = model.params.input_dim;
    j["hidden"] = model.params.hidden;
    j["theta"] = model.params.theta;
    j["scaler"] = {{"min", model.scaler.min}, {"max", model.scaler.max}};
    j["target_feature"] = model.target_feature;
    return j.dump();
}

LSTMModelFile lstm_from_json(const std::string& json_text) {
    const nlohmann::json j = nlohmann::json::parse(json_text);
    if (j.at("format").get<std::string>() != "windramp-model" ||
        j.at("type").get<std::string>() != "lstm")
        throw std::invalid_argument("not a windramp lstm model file");
    LSTMModelFile out;
    const auto& c = j.at("config");
    out.config.lags = c.at("lags").get<int>();
    out.config.hidden_size = c.at("hidden_size").get<int>();
    out.config.epochs = c.at("epochs").get<int>();
    out.config.learning_rate = c.at("learning_rate").get<double>();
    out.config.batch_size = c.at("batch_size").get<int>();
    out.config.seed = c.at("seed").get<std::uint64_t>();
    out.config.features = c.at("features").get<std::string>() == "Multivariate"
                              ? FeatureSet::Multivariate
                              : FeatureSet::Univariate;
    out.config.shuffle = c.at("shuffle").get<bool>();
    out.params.input_dim = j.at("input_dim").get<int>();
    out.params.hidden = j.at("hidden").get<int>();
    out.params.theta = j.at("theta").get<std::vector<double>>();
    if (out.params.theta.size() !=
        LSTMParams::parameter_count(out.params.input_dim, out.params.hidden))
        throw std::invalid_argument("lstm model file: parameter count mismatch");
    out.scaler.min = j.at("scaler").at("min").get<std::vector<double>>();
    out.scaler.max = j.at("scaler").at("max").get<std::vector<double>>();
    out.target_feature = j.at("target_feature").get<std::size_t>();
    return out;
}

} // namespace windramp
