#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "windramp/timeutil.hpp"

namespace windramp {

/// Evenly sampled scalar time series. Timestamps are implied:
/// timestamp(i) = start + i * interval. Missing points are explicit
/// (std::nullopt), never sentinel numbers.
class UniformSeries {
public:
    UniformSeries() = default;
    UniformSeries(Timestamp start, Duration interval, std::vector<std::optional<double>> values,
                  std::string unit = "");

    /// Convenience constructor for fully present data.
    static UniformSeries dense(Timestamp start, Duration interval, std::vector<double> values,
                               std::string unit = "");

    Timestamp start() const { return start_; }
    Duration interval() const { return interval_; }
    const std::string& unit() const { return unit_; }
    std::size_t size() const { return values_.size(); }
    bool empty() const { return values_.empty(); }

    Timestamp timestamp_at(std::size_t i) const {
        return start_ + static_cast<Timestamp>(i) * interval_;
    }

    const std::optional<double>& operator[](std::size_t i) const { return values_[i]; }
    const std::vector<std::optional<double>>& values() const { return values_; }

    std::size_t present_count() const;
    bool fully_present() const { return present_count() == size(); }

    /// All values as a dense vector; throws if any point is missing.
    std::vector<double> dense_values() const;

    /// Last present value, scanning from the end.
    std::optional<double> last_present() const;

private:
    Timestamp start_ = 0;
    Duration interval_ = 1;
    std::vector<std::optional<double>> values_;
    std::string unit_;
};

/// Chronological holdout split specification. The test set is the
/// chronological tail, sized floor(length * test_fraction).
struct SplitSpec {
    double test_fraction = 0.2;
};

/// Per-feature min-max scaler fitted on training data. apply maps the train
/// minimum to 0 and the train maximum to 1; constant features map to 0
/// (zero-range policy) and invert(0) returns the constant.
struct Scaler {
    std::vector<double> min;
    std::vector<double> max;

    std::size_t feature_count() const { return min.size(); }
    double apply(std::size_t feature, double x) const;
    double invert(std::size_t feature, double x) const;
};

/// Bucket means at a coarser cadence. target_interval must be an integer
/// multiple of the series interval. Buckets are aligned to whole multiples
/// of target_interval on the epoch clock; partial leading/trailing buckets
/// are dropped. A bucket with fewer than min_count present values is
/// missing.
UniformSeries resample_mean(const UniformSeries& series, Duration target_interval, int min_count);

/// Applies the first-difference operator d times; output length shrinks by
/// d. Missing values propagate: a difference touching a missing point is
/// missing.
UniformSeries difference(const UniformSeries& series, int d);

/// Dense variant used by the forecasting modules.
std::vector<double> difference(std::span<const double> values, int d);

/// Inverts d-fold differencing for forecast horizons. anchors holds the
/// last d observed levels, oldest first.
std::vector<double> integrate(std::span<const double> diff_forecasts,
                              std::span<const double> anchors);

/// Splits into chronological (train, test). Rejects degenerate splits where
/// either side would be empty.
std::pair<UniformSeries, UniformSeries> chronological_split(const UniformSeries& series,
                                                            const SplitSpec& spec);

/// Fits a min-max scaler per feature column; every column needs at least
/// one present value.
Scaler fit_scaler(std::span<const std::vector<std::optional<double>>> columns);

} // namespace windramp
