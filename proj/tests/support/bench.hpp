#pragma once

// The synthetic ramp benchmark suite shared by the wavelet tests and the
// acceptance binary: 100 seeded profiles, one ramp each, riding on
// band-limited ARMA noise (wind-farm power at 10-min cadence is smooth at
// the sample scale, so the noise carries little energy above the shortest
// wavelet scale).

#include <cstdint>

#include "windramp/rng.hpp"
#include "windramp/synth.hpp"

namespace bench {

constexpr int kCases = 100;
constexpr std::size_t kLength = 240;

inline windramp::SynthConfig profile_config(int case_index) {
    windramp::SynthConfig sc;
    sc.kind = windramp::SynthConfig::Kind::Composite;
    sc.length = kLength;
    sc.seed = 5000 + static_cast<std::uint64_t>(case_index);
    sc.base_level = 3000.0;
    sc.phi = {0.9};
    sc.theta = {0.9, 0.7, 0.5, 0.3};
    sc.sigma = 25.0;

    windramp::Rng rng(sc.seed);
    windramp::SynthEvent ev;
    ev.midpoint = static_cast<std::size_t>(rng.uniform_int(30, 200));
    ev.delta_t = static_cast<int>(rng.uniform_int(4, 10));
    ev.delta_p = (rng.uniform01() < 0.5 ? -1.0 : 1.0) * rng.uniform(1000.0, 4000.0);
    sc.events = {ev};
    return sc;
}

} // namespace bench
