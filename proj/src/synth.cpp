#include "windramp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "windramp/arma.hpp"
#include "windramp/rng.hpp"

namespace windramp {

namespace {

constexpr std::size_t kBurnIn = 500;

std::vector<double> arma_path(std::size_t length, std::span<const double> phi,
                              std::span<const double> theta, double sigma, double mean, Rng& rng) {
    const std::size_t p = phi.size();
    const std::size_t q = theta.size();
    const std::size_t total = length + kBurnIn;
    std::vector<double> x(total, mean);
    std::vector<double> e(total, 0.0);
    for (std::size_t t = 0; t < total; ++t) {
        e[t] = sigma > 0.0 ? sigma * rng.gaussian() : 0.0;
        double v = e[t];
        for (std::size_t i = 0; i < p; ++i)
            if (t >= i + 1) v += phi[i] * (x[t - 1 - i] - mean);
        for (std::size_t j = 0; j < q; ++j)
            if (t >= j + 1) v += theta[j] * e[t - 1 - j];
        x[t] = mean + v;
    }
    return {x.begin() + static_cast<std::ptrdiff_t>(kBurnIn), x.end()};
}

} // namespace

UniformSeries gen_arma(const SynthConfig& config) {
    if (config.length == 0) throw std::invalid_argument("gen_arma: length must be > 0");
    if (!(config.sigma >= 0.0)) throw std::invalid_argument("gen_arma: sigma must be >= 0");
    if (!ar_stationary(config.phi))
        throw std::invalid_argument("gen_arma: non-stationary AR coefficients");
    Rng rng(config.seed);
    std::vector<double> x =
        arma_path(config.length, config.phi, config.theta, config.sigma, config.mean, rng);
    return UniformSeries::dense(config.start, config.interval, std::move(x), "kW");
}

namespace {

// Noiseless piecewise-linear profile. Each event ramps linearly over
// [mid - dt/2, mid - dt/2 + dt]; the level stays at the new value after it.
std::vector<double> profile_path(const SynthConfig& config) {
    std::vector<std::size_t> starts;
    for (const auto& ev : config.events) {
        if (ev.delta_t < 1) throw std::invalid_argument("gen_ramp_profile: delta_t must be >= 1");
        const std::size_t half = static_cast<std::size_t>(ev.delta_t) / 2;
        if (ev.midpoint < half)
            throw std::invalid_argument("gen_ramp_profile: event starts before the series");
        const std::size_t s = ev.midpoint - half;
        if (s + static_cast<std::size_t>(ev.delta_t) >= config.length)
            throw std::invalid_argument("gen_ramp_profile: event overruns the series");
        starts.push_back(s);
    }
    // Events must not overlap (checked in series order).
    std::vector<std::size_t> idx(config.events.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return starts[a] < starts[b]; });
    for (std::size_t k = 1; k < idx.size(); ++k) {
        const auto& prev = config.events[idx[k - 1]];
        if (starts[idx[k - 1]] + static_cast<std::size_t>(prev.delta_t) > starts[idx[k]])
            throw std::invalid_argument("gen_ramp_profile: overlapping events");
    }

    std::vector<double> x(config.length, config.base_level);
    double level = config.base_level;
    std::size_t pos = 0;
    for (std::size_t k : idx) {
        const auto& ev = config.events[k];
        const std::size_t s = starts[k];
        for (std::size_t t = pos; t < s; ++t) x[t] = level;
        for (int step = 1; step <= ev.delta_t; ++step)
            x[s + static_cast<std::size_t>(step)] =
                level + ev.delta_p * static_cast<double>(step) / static_cast<double>(ev.delta_t);
        x[s] = level;
        level += ev.delta_p;
        pos = s + static_cast<std::size_t>(ev.delta_t) + 1;
    }
    for (std::size_t t = pos; t < config.length; ++t) x[t] = level;

    if (config.rated_power_clip.has_value())
        for (double& v : x) v = std::min(v, *config.rated_power_clip);
    return x;
}

GroundTruth finish_profile(const SynthConfig& config, std::vector<double> clean,
                           std::vector<double> noise) {
    std::vector<RampEvent> truth;
    for (const auto& ev : config.events) {
        const std::size_t half = static_cast<std::size_t>(ev.delta_t) / 2;
        const std::size_t s = ev.midpoint - half;
        const std::size_t e = s + static_cast<std::size_t>(ev.delta_t);
        RampEvent r;
        r.t0 = config.start + static_cast<Timestamp>(s) * config.interval;
        r.delta_p = clean[e] - clean[s]; // realised variation (after any clip)
        r.delta_t = static_cast<Duration>(ev.delta_t) * config.interval;
        r.rate = r.delta_p / (static_cast<double>(r.delta_t) / 60.0);
        r.direction = ev.delta_p >= 0 ? +1 : -1;
        truth.push_back(r);
    }
    std::sort(truth.begin(), truth.end(),
              [](const RampEvent& a, const RampEvent& b) { return a.t0 < b.t0; });

    for (std::size_t t = 0; t < clean.size(); ++t) clean[t] += noise[t];
    GroundTruth gt;
    gt.series = UniformSeries::dense(config.start, config.interval, std::move(clean), "kW");
    gt.events = std::move(truth);
    return gt;
}

} // namespace

GroundTruth gen_ramp_profile(const SynthConfig& config) {
    if (config.length == 0) throw std::invalid_argument("gen_ramp_profile: length must be > 0");
    if (!(config.noise_sigma >= 0.0))
        throw std::invalid_argument("gen_ramp_profile: noise sigma must be >= 0");
    std::vector<double> clean = profile_path(config);
    std::vector<double> noise(config.length, 0.0);
    if (config.noise_sigma > 0.0) {
        Rng rng = Rng(config.seed).split(0);
        for (double& v : noise) v = config.noise_sigma * rng.gaussian();
    }
    return finish_profile(config, std::move(clean), std::move(noise));
}

GroundTruth gen_composite(const SynthConfig& config) {
    if (config.length == 0) throw std::invalid_argument("gen_composite: length must be > 0");
    if (!ar_stationary(config.phi))
        throw std::invalid_argument("gen_composite: non-stationary AR coefficients");
    std::vector<double> clean = profile_path(config);
    Rng rng = Rng(config.seed).split(0);
    std::vector<double> noise =
        arma_path(config.length, config.phi, config.theta, config.sigma, 0.0, rng);
    return finish_profile(config, std::move(clean), std::move(noise));
}

GroundTruth generate(const SynthConfig& config) {
    switch (config.kind) {
        case SynthConfig::Kind::Arma: {
            GroundTruth gt;
            gt.series = gen_arma(config);
            return gt;
        }
        case SynthConfig::Kind::RampProfile: return gen_ramp_profile(config);
        default: return gen_composite(config);
    }
}

} // namespace windramp
