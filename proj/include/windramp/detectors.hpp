#pragma once

#include <cstddef>
#include <vector>

#include "windramp/series.hpp"

namespace windramp {

/// Parameters of the four classic binary ramp definitions. Each detector
/// reads only its own parameters.
struct BinaryRampConfig {
    int delta_t = 6;      // window in samples
    double p_val = 0.0;   // power threshold, series units
    double p_rr = 0.0;    // ramp-rate threshold, units per sample
    int n_nam = 3;        // filtered-signal averaging count
};

enum class DetectionFlag { NoRamp, Ramp, NotEvaluable };

const char* to_string(DetectionFlag f);

/// Per-step ramp/no-ramp flags over the evaluable positions of a series.
/// start_index is the source index of flags[0]; positions touching missing
/// inputs are NotEvaluable. directions holds +1/-1 for signed definitions
/// and 0 elsewhere.
struct BinaryDetection {
    std::size_t start_index = 0;
    std::vector<DetectionFlag> flags;
    std::vector<int> directions;

    std::size_t ramp_count() const;
    std::size_t evaluable_count() const;
};

/// Endpoint definition: ramp at t iff |y[t+dt] - y[t]| > p_val (strict).
/// Signed: direction follows the difference.
BinaryDetection detect_endpoint(const UniformSeries& series, int delta_t, double p_val);

/// Range definition: ramp at t iff max(y[t..t+dt]) - min(y[t..t+dt]) > p_val.
/// Unsigned; does not characterise rate of change.
BinaryDetection detect_minmax(const UniformSeries& series, int delta_t, double p_val);

/// Rate definition: ramp at t iff |(y[t+dt] - y[t]) / dt| > p_rr. Signed.
BinaryDetection detect_rate(const UniformSeries& series, int delta_t, double p_rr);

/// Filtered power signal: Pf[t] = mean over h in 1..n_nam of
/// (y[t+h] - y[t+h-n_nam]). Returned aligned to the source series with
/// missing values where the indices overrun.
UniformSeries filtered_signal(const UniformSeries& series, int n_nam);

/// Ramp at t iff |Pf[t]| > p_val on the filtered signal. Signed.
BinaryDetection detect_filtered(const UniformSeries& series, int n_nam, double p_val);

} // namespace windramp
