#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "windramp/wavelet.hpp"

namespace windramp {

/// Point-forecast errors over n scored pairs.
struct Metrics {
    double mae = 0.0;
    double rmse = 0.0;
    std::size_t n = 0;
};

/// Metrics partitioned by the ramp class of the actual series. Empty
/// classes are absent, not zero.
struct RampConditionedMetrics {
    std::optional<Metrics> up;
    std::optional<Metrics> down;
    std::optional<Metrics> none;
};

/// Forecast horizon categories with their customary hour bounds. The upper
/// bound of the first two categories varies by market convention (4 or 9
/// hours, 48 or 72 hours); categorisation uses the wider variant.
enum class HorizonCategory { VeryShort, Short, Medium };

const char* to_string(HorizonCategory c);
const char* horizon_bounds(HorizonCategory c);
HorizonCategory categorize_horizon(double hours);

/// One evaluation run, mirroring the standard report row layout plus
/// provenance fields. Absent optionals render as "-" in the CSV view.
struct EvalReport {
    std::string model;
    std::string data_sample_rate;  // "10 min" | "Hourly"
    std::string data_selection;    // "Univariate" | "Multivariate"
    std::optional<int> lags;
    double fit_time_s = 0.0;
    double forecast_time_s = 0.0;
    std::optional<Metrics> train;
    Metrics test;
    RampConditionedMetrics ramp;
    HorizonCategory horizon = HorizonCategory::VeryShort;
    std::string config_fingerprint;
};

/// MAE and RMSE of pred vs actual. Pairs with missing actuals are excluded;
/// zero scoreable pairs is an error.
Metrics point_metrics(std::span<const double> pred,
                      std::span<const std::optional<double>> actual);
Metrics point_metrics(std::span<const double> pred, std::span<const double> actual);

/// Partitions the scored indices by ramp class and computes Metrics per
/// class. labels must be aligned to the actuals.
RampConditionedMetrics conditioned_metrics(std::span<const double> pred,
                                           std::span<const std::optional<double>> actual,
                                           const RampClassSeries& labels);

/// "mm:ss" rendering of a duration (rounded to whole seconds).
std::string format_mmss(double seconds);

/// CSV header / row for the standard report layout; numeric fields at two
/// decimals, absent fields as "-".
std::string report_csv_header();
std::string report_csv_row(const EvalReport& report);

/// Full-precision JSON object for one report.
std::string report_json(const EvalReport& report);
EvalReport report_from_json(const std::string& json_text);

/// FNV-1a 64-bit hash, hex-encoded; used to fingerprint resolved configs.
std::string fingerprint(const std::string& text);

} // namespace windramp
