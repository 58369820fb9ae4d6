#pragma once

#include <cmath>
#include <cstdint>

namespace windramp {

/// Named, versioned pseudo-random generator: "splitmix64-boxmuller/1".
///
/// SplitMix64 for the 64-bit integer stream, Box-Muller for Gaussians.
/// Deterministic per seed and splittable into independent child streams,
/// so cross-language ports can reproduce the stream exactly.
class Rng {
public:
    static constexpr const char* kName = "splitmix64-boxmuller/1";

    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [lo, hi] inclusive. Modulo bias is negligible for
    /// the small ranges used here.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(next_u64() %
                                              static_cast<std::uint64_t>(hi - lo + 1));
    }

    /// Standard normal via Box-Muller; consumes two uniforms per pair,
    /// caches the second value.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1] so log(u1) is finite.
        const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    /// Independent child stream; stream indices give distinct, reproducible
    /// generators (used to split per-column noise streams).
    Rng split(std::uint64_t stream) const {
        Rng child(state_ + 0x9E3779B97F4A7C15ULL * (stream + 1));
        child.state_ = child.next_u64();
        return child;
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace windramp
