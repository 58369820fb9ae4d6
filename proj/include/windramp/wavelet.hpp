#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "windramp/series.hpp"

namespace windramp {

/// Scale window for the multi-scale ramp function. lambda_min is at least 2
/// (a gradient needs two samples). With sign_correction on, sustained
/// up-gradients give positive ramp-function values.
struct WaveletConfig {
    int lambda_min = 2;
    int lambda_max = 6;
    bool sign_correction = true;
};

/// Coefficients of one Haar scale, centre-aligned to the source series.
/// Positions whose window overruns either edge hold 0 and are flagged;
/// positions whose window covers a missing input are missing.
struct WaveletCoefficients {
    int lambda = 0;
    std::vector<std::optional<double>> values;
    std::vector<bool> edge; // true where the window overran the series
};

/// Continuous ramp-intensity index aligned to the source series.
struct RampFunctionSeries {
    std::vector<std::optional<double>> values;
    WaveletConfig config;

    std::size_t size() const { return values.size(); }
};

enum class RampClass { None, Up, Down };

const char* to_string(RampClass c);

/// Per-step ramp class labels. Up iff R > threshold, Down iff R < -threshold
/// (strict inequalities); anything else, including missing R, is None.
struct RampClassSeries {
    std::vector<RampClass> labels;
    double threshold = 0.0;

    std::size_t size() const { return labels.size(); }
};

/// Threshold specification: an absolute value, or a quantile of |R| resolved
/// over a reference window (training data by default).
struct ThresholdSpec {
    enum class Kind { Absolute, Quantile } kind = Kind::Quantile;
    double value = 0.9;

    static ThresholdSpec absolute(double theta) { return {Kind::Absolute, theta}; }
    static ThresholdSpec quantile(double q) { return {Kind::Quantile, q}; }
};

/// One detected ramp event with the classic characterisation parameters.
struct RampEvent {
    Timestamp t0 = 0;        // event start (baseline sample)
    double delta_p = 0.0;    // signed power variation, kW
    Duration delta_t = 0;    // duration, seconds
    double rate = 0.0;       // kW per minute
    int direction = 0;       // +1 up, -1 down
};

/// Events plus bookkeeping about runs that could not be turned into events.
struct EventExtraction {
    std::vector<RampEvent> events;
    int dropped_missing_power = 0; // run abutted a missing power value
    int dropped_sign_mismatch = 0; // realised delta_p contradicted the label
};

/// Discrete Haar kernel of length lambda: the first floor(lambda/2) weights
/// are +1/sqrt(lambda), the last floor(lambda/2) are -1/sqrt(lambda), and an
/// odd lambda gets a zero middle weight. Weights sum to exactly zero.
std::vector<double> haar_kernel(int lambda);

/// Haar coefficients at scale lambda, centre-aligned: the coefficient at
/// index tau + floor((lambda-1)/2) is the kernel dot product with
/// y[tau .. tau+lambda-1]. The raw sign is opposite to the gradient
/// (a rising window gives a negative coefficient).
///
/// Computed as (sum of first half - sum of last half) / sqrt(lambda), which
/// is algebraically the kernel dot product and keeps level-shift invariance
/// and antisymmetry exact on integer-valued data.
WaveletCoefficients wavelet_coefficients(const UniformSeries& series, int lambda);

/// Ramp function: scale-summed Haar coefficients over
/// lambda in [lambda_min, lambda_max], negated when sign_correction is on so
/// that up-ramps give positive values.
RampFunctionSeries ramp_function(const UniformSeries& series, const WaveletConfig& config);

/// Linear-interpolation quantile (q in [0,1]) of the data.
double interpolated_quantile(std::vector<double> data, double q);

/// Resolves the threshold (from reference |R| values for quantile specs) and
/// applies the strict-inequality labelling rule.
RampClassSeries classify(const RampFunctionSeries& ramp_fn, const ThresholdSpec& spec);

/// As above but resolving a quantile threshold over a separate reference
/// ramp function (e.g. the training window).
RampClassSeries classify(const RampFunctionSeries& ramp_fn, const ThresholdSpec& spec,
                         const RampFunctionSeries& reference);

/// Merges maximal runs of identical non-None labels into events. For a run
/// over indices [s..e] the baseline is b = max(s-1, 0): delta_p =
/// power[e] - power[b], delta_t = (e-b) * interval (at least one interval for
/// the degenerate run starting at index 0), t0 = timestamp(b). Runs abutting
/// missing power are dropped and counted.
EventExtraction extract_events(const RampClassSeries& labels, const UniformSeries& power);

} // namespace windramp
