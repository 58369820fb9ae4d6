#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "windramp/series.hpp"

namespace windramp {

enum class FeatureSet { Univariate, Multivariate };

const char* to_string(FeatureSet f);

struct LSTMConfig {
    int lags = 1;
    int hidden_size = 32;
    int epochs = 60;
    double learning_rate = 0.003;
    int batch_size = 32;
    std::uint64_t seed = 1;
    FeatureSet features = FeatureSet::Univariate;
    bool shuffle = false; // opt-in; chronological batches by default
};

/// Single-layer LSTM parameters in one flat vector. Layout (row-major
/// matrices, H = hidden, F = input features):
///   W_i W_f W_o W_g (each HxF) | U_i U_f U_o U_g (each HxH) |
///   b_i b_f b_o b_g (each H)   | w_y (H) | b_y (1)
struct LSTMParams {
    int input_dim = 0;
    int hidden = 0;
    std::vector<double> theta;

    static std::size_t parameter_count(int input_dim, int hidden);

    std::span<double> block_w(int gate);             // gate in [0,4): i,f,o,g
    std::span<double> block_u(int gate);
    std::span<double> block_b(int gate);
    std::span<double> readout_w();
    double& readout_b();
    std::span<const double> block_w(int gate) const;
    std::span<const double> block_u(int gate) const;
    std::span<const double> block_b(int gate) const;
    std::span<const double> readout_w() const;
    double readout_b() const;
};

/// Supervised windows: window i covers rows [i .. i+lags-1] of the scaled
/// feature columns and targets row i+lags of the target column. Targets
/// strictly follow their windows in time. Rows with any missing value drop
/// the windows that touch them (counted in excluded_windows).
struct WindowedDataset {
    int lags = 0;
    int feature_count = 0;
    std::vector<double> inputs;            // [window][lag][feature], scaled
    std::vector<double> targets;           // scaled target values
    std::vector<std::size_t> target_rows;  // source row of each target
    Scaler scaler;
    std::size_t target_feature = 0;
    std::size_t excluded_windows = 0;

    std::size_t window_count() const { return targets.size(); }
    std::span<const double> window(std::size_t i) const;
};

struct TrainHistory {
    std::vector<double> epoch_loss; // MSE in scaled space
    double wall_time_s = 0.0;
};

WindowedDataset make_windows(std::span<const std::vector<std::optional<double>>> columns, int lags,
                             std::size_t target_column, const Scaler& scaler);

/// Seeded uniform init scaled by 1/sqrt(fan_in); forget-gate bias +1.
LSTMParams init_params(const LSTMConfig& config, int input_dim);

/// Intermediates retained for backpropagation through time.
struct ForwardCache {
    std::vector<double> x;      // [step][feature]
    std::vector<double> i, f, o, g, c, tanh_c, h; // [step][hidden]
    int steps = 0;
};

/// Unrolls the cell over the window from zero initial state and applies the
/// linear readout to the final hidden state. Throws on non-finite
/// intermediates.
double forward(const LSTMParams& params, std::span<const double> window,
               ForwardCache* cache = nullptr);

/// Exact analytic gradient of the mean squared error over the window batch
/// [begin, end), same layout as LSTMParams::theta. loss_out, when given,
/// receives the batch MSE.
std::vector<double> gradients(const LSTMParams& params, const WindowedDataset& data,
                              std::size_t begin, std::size_t end, double* loss_out = nullptr);

/// Mini-batch Adam training, chronological batch order, fixed epoch count;
/// bit-deterministic per seed. Divergence aborts with the epoch index.
std::pair<LSTMParams, TrainHistory> train(const LSTMConfig& config, const WindowedDataset& data);

/// One prediction per window, inverse-scaled to physical units.
std::vector<double> predict(const LSTMParams& params, const WindowedDataset& data);

/// Versioned model file contents: parameters with the config and scaler
/// embedded so a saved model can predict on raw physical inputs.
struct LSTMModelFile {
    LSTMParams params;
    LSTMConfig config;
    Scaler scaler;
    std::size_t target_feature = 0;
};

std::string lstm_to_json(const LSTMModelFile& model);
LSTMModelFile lstm_from_json(const std::string& json_text);

} // namespace windramp
