#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "windramp/series.hpp"
#include "windramp/wavelet.hpp"

namespace windramp {

/// One injected ramp for the profile generator: a linear change of delta_p
/// over delta_t samples centred at midpoint.
struct SynthEvent {
    std::size_t midpoint = 0;
    double delta_p = 0.0; // signed, kW
    int delta_t = 1;      // samples
};

struct SynthConfig {
    enum class Kind { Arma, RampProfile, Composite } kind = Kind::Composite;
    std::size_t length = 2000;
    Duration interval = 600;
    Timestamp start = 1356998400; // 2013-01-01T00:00:00Z
    std::uint64_t seed = 1;

    // ARMA process settings (kind = Arma, and the noise of Composite).
    std::vector<double> phi;
    std::vector<double> theta;
    double sigma = 1.0;
    double mean = 0.0;

    // Ramp profile settings (kind = RampProfile | Composite).
    double base_level = 3000.0; // kW
    std::vector<SynthEvent> events;
    double noise_sigma = 0.0;                 // white noise for RampProfile
    std::optional<double> rated_power_clip;   // clip at rated power
};

/// Generated series plus the injected events it realises.
struct GroundTruth {
    UniformSeries series;
    std::vector<RampEvent> events;
};

/// Stationary ARMA recursion with Gaussian innovations; a 500-sample
/// burn-in is discarded. Deterministic per seed.
UniformSeries gen_arma(const SynthConfig& config);

/// Piecewise-linear profile: flat base, linear ramps, optional clipping at
/// rated power, plus Gaussian noise. The returned event list carries the
/// realised (post-clip) power variations of the noiseless profile.
GroundTruth gen_ramp_profile(const SynthConfig& config);

/// Ramp profile with ARMA noise riding on it instead of white noise.
GroundTruth gen_composite(const SynthConfig& config);

/// Dispatch on config.kind.
GroundTruth generate(const SynthConfig& config);

} // namespace windramp
