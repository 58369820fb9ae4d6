#include "windramp/detectors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace windramp {

const char* to_string(DetectionFlag f) {
    switch (f) {
        case DetectionFlag::Ramp: return "ramp";
        case DetectionFlag::NoRamp: return "no-ramp";
        default: return "not-evaluable";
    }
}

std::size_t BinaryDetection::ramp_count() const {
    return static_cast<std::size_t>(
        std::count(flags.begin(), flags.end(), DetectionFlag::Ramp));
}

std::size_t BinaryDetection::evaluable_count() const {
    return flags.size() - static_cast<std::size_t>(std::count(flags.begin(), flags.end(),
                                                              DetectionFlag::NotEvaluable));
}

namespace {

void require_window(const UniformSeries& series, int delta_t) {
    if (delta_t < 1) throw std::invalid_argument("detector: delta_t must be >= 1");
    if (static_cast<std::size_t>(delta_t) >= series.size())
        throw std::invalid_argument("detector: delta_t must be smaller than the series length");
}

} // namespace

BinaryDetection detect_endpoint(const UniformSeries& series, int delta_t, double p_val) {
    require_window(series, delta_t);
    if (!(p_val > 0.0)) throw std::invalid_argument("detect_endpoint: p_val must be > 0");
    BinaryDetection out;
    const std::size_t count = series.size() - static_cast<std::size_t>(delta_t);
    out.flags.reserve(count);
    out.directions.reserve(count);
    for (std::size_t t = 0; t < count; ++t) {
        const auto& a = series[t];
        const auto& b = series[t + static_cast<std::size_t>(delta_t)];
        if (!a.has_value() || !b.has_value()) {
            out.flags.push_back(DetectionFlag::NotEvaluable);
            out.directions.push_back(0);
            continue;
        }
        const double diff = *b - *a;
        const bool ramp = std::fabs(diff) > p_val;
        out.flags.push_back(ramp ? DetectionFlag::Ramp : DetectionFlag::NoRamp);
        out.directions.push_back(ramp ? (diff > 0 ? +1 : -1) : 0);
    }
    return out;
}

BinaryDetection detect_minmax(const UniformSeries& series, int delta_t, double p_val) {
    require_window(series, delta_t);
    if (!(p_val > 0.0)) throw std::invalid_argument("detect_minmax: p_val must be > 0");
    BinaryDetection out;
    const std::size_t count = series.size() - static_cast<std::size_t>(delta_t);
    out.flags.reserve(count);
    out.directions.assign(count, 0);
    for (std::size_t t = 0; t < count; ++t) {
        double lo = 0.0, hi = 0.0;
        bool any = false, missing = false;
        for (std::size_t k = 0; k <= static_cast<std::size_t>(delta_t); ++k) {
            const auto& v = series[t + k];
            if (!v.has_value()) {
                missing = true;
                break;
            }
            if (!any) {
                lo = hi = *v;
                any = true;
            } else {
                lo = std::min(lo, *v);
                hi = std::max(hi, *v);
            }
        }
        if (missing)
            out.flags.push_back(DetectionFlag::NotEvaluable);
        else
            out.flags.push_back(hi - lo > p_val ? DetectionFlag::Ramp : DetectionFlag::NoRamp);
    }
    return out;
}

BinaryDetection detect_rate(const UniformSeries& series, int delta_t, double p_rr) {
    require_window(series, delta_t);
    if (!(p_rr > 0.0)) throw std::invalid_argument("detect_rate: p_rr must be > 0");
    BinaryDetection out;
    const std::size_t count = series.size() - static_cast<std::size_t>(delta_t);
    out.flags.reserve(count);
    out.directions.reserve(count);
    for (std::size_t t = 0; t < count; ++t) {
        const auto& a = series[t];
        const auto& b = series[t + static_cast<std::size_t>(delta_t)];
        if (!a.has_value() || !b.has_value()) {
            out.flags.push_back(DetectionFlag::NotEvaluable);
            out.directions.push_back(0);
            continue;
        }
        const double rate = (*b - *a) / static_cast<double>(delta_t);
        const bool ramp = std::fabs(rate) > p_rr;
        out.flags.push_back(ramp ? DetectionFlag::Ramp : DetectionFlag::NoRamp);
        out.directions.push_back(ramp ? (rate > 0 ? +1 : -1) : 0);
    }
    return out;
}

UniformSeries filtered_signal(const UniformSeries& series, int n_nam) {
    if (n_nam < 1) throw std::invalid_argument("filtered_signal: n_nam must be >= 1");
    if (series.size() < 2 * static_cast<std::size_t>(n_nam))
        throw std::invalid_argument("filtered_signal: series length must be >= 2*n_nam");
    const std::size_t n = series.size();
    std::vector<std::optional<double>> out(n);
    // Evaluable t: indices t+h and t+h-n_nam must exist for h = 1..n_nam.
    for (std::size_t t = static_cast<std::size_t>(n_nam) - 1; t + static_cast<std::size_t>(n_nam) < n;
         ++t) {
        double sum = 0.0;
        bool missing = false;
        for (int h = 1; h <= n_nam; ++h) {
            const auto& fwd = series[t + static_cast<std::size_t>(h)];
            const auto& bwd = series[t + static_cast<std::size_t>(h) - static_cast<std::size_t>(n_nam)];
            if (!fwd.has_value() || !bwd.has_value()) {
                missing = true;
                break;
            }
            sum += *fwd - *bwd;
        }
        if (!missing) out[t] = sum / static_cast<double>(n_nam);
    }
    return UniformSeries(series.start(), series.interval(), std::move(out), series.unit());
}

BinaryDetection detect_filtered(const UniformSeries& series, int n_nam, double p_val) {
    if (!(p_val > 0.0)) throw std::invalid_argument("detect_filtered: p_val must be > 0");
    const UniformSeries pf = filtered_signal(series, n_nam);
    BinaryDetection out;
    out.start_index = static_cast<std::size_t>(n_nam) - 1;
    const std::size_t last = series.size() - static_cast<std::size_t>(n_nam); // exclusive
    for (std::size_t t = out.start_index; t < last; ++t) {
        if (!pf[t].has_value()) {
            out.flags.push_back(DetectionFlag::NotEvaluable);
            out.directions.push_back(0);
            continue;
        }
        const bool ramp = std::fabs(*pf[t]) > p_val;
        out.flags.push_back(ramp ? DetectionFlag::Ramp : DetectionFlag::NoRamp);
        out.directions.push_back(ramp ? (*pf[t] > 0 ? +1 : -1) : 0);
    }
    return out;
}

} // namespace windramp
