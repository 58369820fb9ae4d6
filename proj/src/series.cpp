#include "windramp/series.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace windramp {

UniformSeries::UniformSeries(Timestamp start, Duration interval,
                             std::vector<std::optional<double>> values, std::string unit)
    : start_(start), interval_(interval), values_(std::move(values)), unit_(std::move(unit)) {
    if (interval_ <= 0) throw std::invalid_argument("UniformSeries: interval must be > 0");
}

UniformSeries UniformSeries::dense(Timestamp start, Duration interval, std::vector<double> values,
                                   std::string unit) {
    std::vector<std::optional<double>> v(values.begin(), values.end());
    return UniformSeries(start, interval, std::move(v), std::move(unit));
}

std::size_t UniformSeries::present_count() const {
    std::size_t n = 0;
    for (const auto& v : values_)
        if (v.has_value()) ++n;
    return n;
}

std::vector<double> UniformSeries::dense_values() const {
    std::vector<double> out;
    out.reserve(values_.size());
    for (const auto& v : values_) {
        if (!v.has_value())
            throw std::invalid_argument("series contains missing values where dense data is required");
        out.push_back(*v);
    }
    return out;
}

std::optional<double> UniformSeries::last_present() const {
    for (auto it = values_.rbegin(); it != values_.rend(); ++it)
        if (it->has_value()) return *it;
    return std::nullopt;
}

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

} // namespace

UniformSeries resample_mean(const UniformSeries& series, Duration target_interval, int min_count) {
    if (min_count < 1) throw std::invalid_argument("resample_mean: min_count must be >= 1");
    if (target_interval <= 0) throw std::invalid_argument("resample_mean: target interval must be > 0");
    if (target_interval % series.interval() != 0)
        throw std::invalid_argument("resample_mean: target interval " + std::to_string(target_interval) +
                                    "s is not an integer multiple of the series interval " +
                                    std::to_string(series.interval()) + "s");
    const std::int64_t ratio = target_interval / series.interval();
    if (ratio == 1) {
        if (min_count > 1) {
            std::vector<std::optional<double>> none(series.size());
            return UniformSeries(series.start(), series.interval(), std::move(none), series.unit());
        }
        return series;
    }

    // First bucket boundary at or after the series start, on the epoch clock.
    const Timestamp first_bucket =
        floor_div(series.start() + target_interval - 1, target_interval) * target_interval;
    const Timestamp end = series.start() + static_cast<Timestamp>(series.size()) * series.interval();

    std::vector<std::optional<double>> out;
    for (Timestamp b = first_bucket; b + target_interval <= end; b += target_interval) {
        const std::size_t i0 = static_cast<std::size_t>((b - series.start()) / series.interval());
        double sum = 0.0;
        int present = 0;
        for (std::int64_t k = 0; k < ratio; ++k) {
            const auto& v = series[i0 + static_cast<std::size_t>(k)];
            if (v.has_value()) {
                sum += *v;
                ++present;
            }
        }
        if (present >= min_count)
            out.emplace_back(sum / present);
        else
            out.emplace_back(std::nullopt);
    }
    return UniformSeries(first_bucket, target_interval, std::move(out), series.unit());
}

UniformSeries difference(const UniformSeries& series, int d) {
    if (d < 0) throw std::invalid_argument("difference: d must be >= 0");
    if (series.present_count() < static_cast<std::size_t>(d) + 1)
        throw std::invalid_argument("difference: series needs at least d+1 present values");
    std::vector<std::optional<double>> cur(series.values());
    for (int round = 0; round < d; ++round) {
        std::vector<std::optional<double>> next;
        next.reserve(cur.size() - 1);
        for (std::size_t i = 1; i < cur.size(); ++i) {
            if (cur[i].has_value() && cur[i - 1].has_value())
                next.emplace_back(*cur[i] - *cur[i - 1]);
            else
                next.emplace_back(std::nullopt);
        }
        cur = std::move(next);
    }
    return UniformSeries(series.start() + static_cast<Timestamp>(d) * series.interval(),
                         series.interval(), std::move(cur), series.unit());
}

std::vector<double> difference(std::span<const double> values, int d) {
    if (d < 0) throw std::invalid_argument("difference: d must be >= 0");
    if (values.size() < static_cast<std::size_t>(d) + 1)
        throw std::invalid_argument("difference: series needs at least d+1 values");
    std::vector<double> cur(values.begin(), values.end());
    for (int round = 0; round < d; ++round) {
        std::vector<double> next(cur.size() - 1);
        for (std::size_t i = 1; i < cur.size(); ++i) next[i - 1] = cur[i] - cur[i - 1];
        cur = std::move(next);
    }
    return cur;
}

std::vector<double> integrate(std::span<const double> diff_forecasts,
                              std::span<const double> anchors) {
    const int d = static_cast<int>(anchors.size());
    // Last value of each differencing stage, computable from the last d levels.
    std::vector<std::vector<double>> stage(static_cast<std::size_t>(d) + 1);
    stage[0].assign(anchors.begin(), anchors.end());
    for (int k = 1; k <= d; ++k) {
        const auto& prev = stage[static_cast<std::size_t>(k) - 1];
        auto& cur = stage[static_cast<std::size_t>(k)];
        cur.resize(prev.size() - 1);
        for (std::size_t i = 1; i < prev.size(); ++i) cur[i - 1] = prev[i] - prev[i - 1];
    }

    std::vector<double> out(diff_forecasts.begin(), diff_forecasts.end());
    for (int k = d - 1; k >= 0; --k) {
        double level = stage[static_cast<std::size_t>(k)].back();
        for (double& v : out) {
            level += v;
            v = level;
        }
    }
    return out;
}

std::pair<UniformSeries, UniformSeries> chronological_split(const UniformSeries& series,
                                                            const SplitSpec& spec) {
    if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0))
        throw std::invalid_argument("chronological_split: test_fraction must be in (0,1)");
    if (series.size() < 2)
        throw std::invalid_argument("chronological_split: series needs at least 2 points");
    const std::size_t test_len =
        static_cast<std::size_t>(std::floor(static_cast<double>(series.size()) * spec.test_fraction));
    const std::size_t train_len = series.size() - test_len;
    if (test_len == 0 || train_len == 0)
        throw std::invalid_argument("chronological_split: degenerate split (empty train or test)");

    std::vector<std::optional<double>> train(series.values().begin(),
                                             series.values().begin() + static_cast<std::ptrdiff_t>(train_len));
    std::vector<std::optional<double>> test(series.values().begin() + static_cast<std::ptrdiff_t>(train_len),
                                            series.values().end());
    return {UniformSeries(series.start(), series.interval(), std::move(train), series.unit()),
            UniformSeries(series.timestamp_at(train_len), series.interval(), std::move(test),
                          series.unit())};
}

double Scaler::apply(std::size_t feature, double x) const {
    const double range = max[feature] - min[feature];
    if (range == 0.0) return 0.0;
    return (x - min[feature]) / range;
}

double Scaler::invert(std::size_t feature, double x) const {
    const double range = max[feature] - min[feature];
    return min[feature] + x * range;
}

Scaler fit_scaler(std::span<const std::vector<std::optional<double>>> columns) {
    Scaler s;
    for (std::size_t f = 0; f < columns.size(); ++f) {
        double lo = 0.0, hi = 0.0;
        bool any = false;
        for (const auto& v : columns[f]) {
            if (!v.has_value()) continue;
            if (!any) {
                lo = hi = *v;
                any = true;
            } else {
                lo = std::min(lo, *v);
                hi = std::max(hi, *v);
            }
        }
        if (!any)
            throw std::invalid_argument("fit_scaler: feature column " + std::to_string(f) +
                                        " has no present values");
        s.min.push_back(lo);
        s.max.push_back(hi);
    }
    return s;
}

} // namespace windramp
