#include "windramp/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace windramp {

const char* to_string(RampClass c) {
    switch (c) {
        case RampClass::Up: return "Up";
        case RampClass::Down: return "Down";
        default: return "None";
    }
}

std::vector<double> haar_kernel(int lambda) {
    if (lambda < 2) throw std::invalid_argument("haar_kernel: lambda must be >= 2");
    const int half = lambda / 2;
    const double w = 1.0 / std::sqrt(static_cast<double>(lambda));
    std::vector<double> kernel(static_cast<std::size_t>(lambda), 0.0);
    for (int i = 0; i < half; ++i) {
        kernel[static_cast<std::size_t>(i)] = w;
        kernel[static_cast<std::size_t>(lambda - 1 - i)] = -w;
    }
    return kernel;
}

WaveletCoefficients wavelet_coefficients(const UniformSeries& series, int lambda) {
    if (lambda < 2) throw std::invalid_argument("wavelet_coefficients: lambda must be >= 2");
    const std::size_t n = series.size();
    if (static_cast<std::size_t>(lambda) > n)
        throw std::invalid_argument("wavelet_coefficients: lambda " + std::to_string(lambda) +
                                    " exceeds series length " + std::to_string(n));

    WaveletCoefficients out;
    out.lambda = lambda;
    out.values.assign(n, std::optional<double>(0.0));
    out.edge.assign(n, true);

    const int half = lambda / 2;
    const int centre_off = (lambda - 1) / 2;
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(lambda));

    for (std::size_t tau = 0; tau + static_cast<std::size_t>(lambda) <= n; ++tau) {
        const std::size_t centre = tau + static_cast<std::size_t>(centre_off);
        bool missing = false;
        double sum_head = 0.0, sum_tail = 0.0;
        for (int i = 0; i < half && !missing; ++i) {
            const auto& a = series[tau + static_cast<std::size_t>(i)];
            const auto& b = series[tau + static_cast<std::size_t>(lambda - 1 - i)];
            if (!a.has_value() || !b.has_value()) {
                missing = true;
                break;
            }
            sum_head += *a;
            sum_tail += *b;
        }
        // The middle sample of an odd window has zero weight but is still
        // inside the window; a hole there makes the coefficient missing too.
        if (!missing && (lambda % 2 == 1) &&
            !series[tau + static_cast<std::size_t>(half)].has_value())
            missing = true;

        out.edge[centre] = false;
        if (missing)
            out.values[centre] = std::nullopt;
        else
            out.values[centre] = (sum_head - sum_tail) * inv_sqrt;
    }
    return out;
}

RampFunctionSeries ramp_function(const UniformSeries& series, const WaveletConfig& config) {
    if (config.lambda_min < 2)
        throw std::invalid_argument("ramp_function: lambda_min must be >= 2");
    if (config.lambda_max < config.lambda_min)
        throw std::invalid_argument("ramp_function: lambda_max must be >= lambda_min");
    if (static_cast<std::size_t>(config.lambda_max) > series.size())
        throw std::invalid_argument("ramp_function: series shorter than lambda_max");

    const std::size_t n = series.size();
    RampFunctionSeries out;
    out.config = config;
    out.values.assign(n, std::optional<double>(0.0));

    // Fixed summation order over lambda keeps results bit-identical.
    for (int lambda = config.lambda_min; lambda <= config.lambda_max; ++lambda) {
        const WaveletCoefficients coeff = wavelet_coefficients(series, lambda);
        for (std::size_t t = 0; t < n; ++t) {
            if (!out.values[t].has_value()) continue;
            if (!coeff.values[t].has_value()) {
                out.values[t] = std::nullopt;
                continue;
            }
            out.values[t] = *out.values[t] + *coeff.values[t];
        }
    }
    if (config.sign_correction) {
        for (auto& v : out.values)
            if (v.has_value()) v = -*v;
    }
    return out;
}

double interpolated_quantile(std::vector<double> data, double q) {
    if (data.empty()) throw std::invalid_argument("quantile of empty data");
    if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile q must be in [0,1]");
    std::sort(data.begin(), data.end());
    const double pos = q * static_cast<double>(data.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = static_cast<std::size_t>(std::ceil(pos));
    if (lo == hi) return data[lo];
    const double frac = pos - static_cast<double>(lo);
    return data[lo] + frac * (data[hi] - data[lo]);
}

namespace {

double resolve_threshold(const ThresholdSpec& spec, const RampFunctionSeries& reference) {
    if (spec.kind == ThresholdSpec::Kind::Absolute) {
        if (!(spec.value > 0.0)) throw std::invalid_argument("absolute threshold must be > 0");
        return spec.value;
    }
    if (!(spec.value > 0.0 && spec.value < 1.0))
        throw std::invalid_argument("quantile threshold must be in (0,1)");
    std::vector<double> abs_r;
    abs_r.reserve(reference.size());
    for (const auto& v : reference.values)
        if (v.has_value()) abs_r.push_back(std::fabs(*v));
    if (abs_r.empty()) throw std::invalid_argument("quantile threshold: reference has no values");
    return interpolated_quantile(std::move(abs_r), spec.value);
}

} // namespace

RampClassSeries classify(const RampFunctionSeries& ramp_fn, const ThresholdSpec& spec) {
    return classify(ramp_fn, spec, ramp_fn);
}

RampClassSeries classify(const RampFunctionSeries& ramp_fn, const ThresholdSpec& spec,
                         const RampFunctionSeries& reference) {
    const double theta = resolve_threshold(spec, reference);
    RampClassSeries out;
    out.threshold = theta;
    out.labels.reserve(ramp_fn.size());
    for (const auto& v : ramp_fn.values) {
        if (!v.has_value()) {
            out.labels.push_back(RampClass::None);
        } else if (*v > theta) {
            out.labels.push_back(RampClass::Up);
        } else if (*v < -theta) {
            out.labels.push_back(RampClass::Down);
        } else {
            out.labels.push_back(RampClass::None);
        }
    }
    return out;
}

EventExtraction extract_events(const RampClassSeries& labels, const UniformSeries& power) {
    if (labels.size() != power.size())
        throw std::invalid_argument("extract_events: labels and power must be aligned");

    EventExtraction out;
    const std::size_t n = labels.size();
    std::size_t i = 0;
    while (i < n) {
        if (labels.labels[i] == RampClass::None) {
            ++i;
            continue;
        }
        const RampClass cls = labels.labels[i];
        std::size_t s = i, e = i;
        while (e + 1 < n && labels.labels[e + 1] == cls) ++e;
        i = e + 1;

        const std::size_t b = (s == 0) ? 0 : s - 1;
        if (!power[b].has_value() || !power[e].has_value()) {
            ++out.dropped_missing_power;
            continue;
        }
        const double delta_p = *power[e] - *power[b];
        const int direction = (cls == RampClass::Up) ? +1 : -1;
        if ((delta_p > 0.0 && direction < 0) || (delta_p < 0.0 && direction > 0)) {
            ++out.dropped_sign_mismatch;
            continue;
        }
        // Degenerate-start rule: a run starting at index 0 has no preceding
        // baseline sample, so the duration is at least one interval.
        const std::int64_t steps = std::max<std::int64_t>(static_cast<std::int64_t>(e - b), 1);
        RampEvent ev;
        ev.t0 = power.timestamp_at(b);
        ev.delta_p = delta_p;
        ev.delta_t = steps * power.interval();
        ev.rate = delta_p / (static_cast<double>(ev.delta_t) / 60.0);
        ev.direction = direction;
        out.events.push_back(ev);
    }
    return out;
}

} // namespace windramp
