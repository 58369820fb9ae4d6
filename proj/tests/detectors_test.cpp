#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "windramp/detectors.hpp"
#include "windramp/rng.hpp"

using namespace windramp;

namespace {
const std::optional<double> kMissing = std::nullopt;

UniformSeries random_walk(std::uint64_t seed, std::size_t n, double step = 20.0) {
    Rng rng(seed);
    std::vector<double> v(n);
    double level = 50.0;
    for (auto& x : v) {
        level += step * rng.gaussian();
        x = level;
    }
    return UniformSeries::dense(0, 600, std::move(v));
}
} // namespace

TEST_CASE("endpoint definition: strict threshold on the endpoint difference") {
    // The motivating limitation case: a 49% change under a 50% threshold.
    const UniformSeries s49 = UniformSeries::dense(0, 600, {0, 10, 49, 20});
    const auto d49 = detect_endpoint(s49, 2, 50.0);
    CHECK(d49.flags[0] == DetectionFlag::NoRamp);

    const UniformSeries s50 = UniformSeries::dense(0, 600, {0, 10, 50});
    CHECK(detect_endpoint(s50, 2, 50.0).flags[0] == DetectionFlag::NoRamp); // equality never fires

    const UniformSeries s51 = UniformSeries::dense(0, 600, {0, 10, 51});
    const auto d51 = detect_endpoint(s51, 2, 50.0);
    CHECK(d51.flags[0] == DetectionFlag::Ramp);
    CHECK(d51.directions[0] == +1);

    const UniformSeries sdown = UniformSeries::dense(0, 600, {60, 10, 2});
    const auto dd = detect_endpoint(sdown, 2, 50.0);
    CHECK(dd.flags[0] == DetectionFlag::Ramp);
    CHECK(dd.directions[0] == -1);
}

TEST_CASE("minmax definition catches interior excursions the endpoint misses") {
    const UniformSeries s = UniformSeries::dense(0, 600, {10, 80, 5});
    const auto ep = detect_endpoint(s, 2, 50.0);
    const auto mm = detect_minmax(s, 2, 50.0);
    CHECK(ep.flags[0] == DetectionFlag::NoRamp); // |5 - 10| = 5
    CHECK(mm.flags[0] == DetectionFlag::Ramp);   // 80 - 5 = 75

    const UniformSeries c = UniformSeries::dense(0, 600, std::vector<double>(8, 3.0));
    for (const auto f : detect_minmax(c, 3, 0.001).flags) CHECK(f == DetectionFlag::NoRamp);
}

TEST_CASE("rate definition thresholds the per-sample rate, strictly") {
    std::vector<double> v(10);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 100.0 + 100.0 * static_cast<double>(i);
    const UniformSeries s = UniformSeries::dense(0, 600, v); // slope 100 per sample
    CHECK(detect_rate(s, 6, 99.0).flags[0] == DetectionFlag::Ramp);
    CHECK(detect_rate(s, 6, 100.0).flags[0] == DetectionFlag::NoRamp); // strict
    CHECK(detect_rate(s, 6, 99.0).directions[0] == +1);

    const UniformSeries c = UniformSeries::dense(0, 600, std::vector<double>(8, 7.0));
    for (const auto f : detect_rate(c, 2, 0.01).flags) CHECK(f == DetectionFlag::NoRamp);
}

TEST_CASE("filtered signal: n*s on a linear series, zero on constants, odd") {
    std::vector<double> v(12);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 2.0 * static_cast<double>(i); // slope 2
    const UniformSeries s = UniformSeries::dense(0, 600, v);
    const int n_nam = 3;
    const UniformSeries pf = filtered_signal(s, n_nam);
    REQUIRE(pf.size() == s.size());
    for (std::size_t t = static_cast<std::size_t>(n_nam) - 1; t + n_nam < s.size(); ++t)
        CHECK(pf[t].value() == doctest::Approx(6.0).epsilon(1e-14)); // n * slope
    CHECK_FALSE(pf[0].has_value());
    CHECK_FALSE(pf[s.size() - 1].has_value());

    const UniformSeries c = UniformSeries::dense(0, 600, std::vector<double>(10, 5.0));
    const UniformSeries pfc = filtered_signal(c, 3);
    for (std::size_t t = 2; t + 3 < c.size(); ++t) CHECK(pfc[t].value() == 0.0);

    // Oddness under negation.
    const UniformSeries rw = random_walk(77, 30);
    std::vector<double> neg = rw.dense_values();
    for (auto& x : neg) x = -x;
    const UniformSeries rwn = UniformSeries::dense(0, 600, neg);
    const auto a = filtered_signal(rw, 4);
    const auto b = filtered_signal(rwn, 4);
    for (std::size_t t = 0; t < a.size(); ++t) {
        if (!a[t].has_value()) {
            CHECK_FALSE(b[t].has_value());
            continue;
        }
        CHECK(b[t].value() == doctest::Approx(-a[t].value()).epsilon(1e-12));
    }

    CHECK_THROWS_AS(filtered_signal(UniformSeries::dense(0, 600, {1, 2, 3}), 2),
                    std::invalid_argument);
}

TEST_CASE("detect_filtered thresholds |Pf| and reports direction") {
    std::vector<double> v(12);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = 2.0 * static_cast<double>(i);
    const UniformSeries s = UniformSeries::dense(0, 600, v);
    const auto det = detect_filtered(s, 3, 5.0); // Pf = 6 > 5
    CHECK(det.start_index == 2);
    for (std::size_t i = 0; i < det.flags.size(); ++i) {
        CHECK(det.flags[i] == DetectionFlag::Ramp);
        CHECK(det.directions[i] == +1);
    }
    const auto none = detect_filtered(s, 3, 6.0); // strict: 6 > 6 is false
    for (const auto f : none.flags) CHECK(f == DetectionFlag::NoRamp);
}

TEST_CASE("missing windows are not evaluable, never silently no-ramp") {
    UniformSeries s(0, 600, {1.0, kMissing, 3.0, 4.0, 5.0});
    const auto ep = detect_endpoint(s, 1, 0.5);
    CHECK(ep.flags[0] == DetectionFlag::NotEvaluable); // needs y[1]
    CHECK(ep.flags[1] == DetectionFlag::NotEvaluable);
    CHECK(ep.flags[2] == DetectionFlag::Ramp);
    const auto mm = detect_minmax(s, 2, 0.5);
    CHECK(mm.flags[0] == DetectionFlag::NotEvaluable);
    CHECK(mm.flags[2] == DetectionFlag::Ramp);
}

TEST_CASE("superset law: minmax detections contain endpoint detections") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed * 13 + 1);
        const UniformSeries s = random_walk(seed, 50);
        const int delta_t = static_cast<int>(rng.uniform_int(1, 8));
        const double p_val = rng.uniform(5.0, 120.0);
        const auto ep = detect_endpoint(s, delta_t, p_val);
        const auto mm = detect_minmax(s, delta_t, p_val);
        REQUIRE(ep.flags.size() == mm.flags.size());
        for (std::size_t t = 0; t < ep.flags.size(); ++t)
            if (ep.flags[t] == DetectionFlag::Ramp) CHECK(mm.flags[t] == DetectionFlag::Ramp);
    }
}

TEST_CASE("threshold monotonicity: raising the threshold never adds detections") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        Rng rng(seed * 7 + 3);
        const UniformSeries s = random_walk(seed + 500, 60);
        const int delta_t = static_cast<int>(rng.uniform_int(1, 6));
        const double lo = rng.uniform(5.0, 50.0);
        const double hi = lo + rng.uniform(1.0, 80.0);
        for (int which = 0; which < 3; ++which) {
            const auto detect = [&](double p) {
                if (which == 0) return detect_endpoint(s, delta_t, p);
                if (which == 1) return detect_minmax(s, delta_t, p);
                return detect_rate(s, delta_t, p / delta_t);
            };
            const auto dl = detect(lo);
            const auto dh = detect(hi);
            for (std::size_t t = 0; t < dl.flags.size(); ++t)
                if (dh.flags[t] == DetectionFlag::Ramp) CHECK(dl.flags[t] == DetectionFlag::Ramp);
        }
    }
}

TEST_CASE("translation invariance: adding a constant changes no detection") {
    const UniformSeries s = random_walk(321, 60);
    std::vector<double> shifted = s.dense_values();
    for (auto& x : shifted) x += 1234.0;
    const UniformSeries t = UniformSeries::dense(0, 600, shifted);
    CHECK(detect_endpoint(s, 3, 25.0).flags == detect_endpoint(t, 3, 25.0).flags);
    CHECK(detect_minmax(s, 3, 25.0).flags == detect_minmax(t, 3, 25.0).flags);
    CHECK(detect_rate(s, 3, 8.0).flags == detect_rate(t, 3, 8.0).flags);
    CHECK(detect_filtered(s, 3, 25.0).flags == detect_filtered(t, 3, 25.0).flags);
}

TEST_CASE("parameter validation") {
    const UniformSeries s = UniformSeries::dense(0, 600, {1, 2, 3, 4});
    CHECK_THROWS_AS(detect_endpoint(s, 4, 1.0), std::invalid_argument);  // delta_t >= length
    CHECK_THROWS_AS(detect_endpoint(s, 1, 0.0), std::invalid_argument);  // threshold must be > 0
    CHECK_THROWS_AS(detect_rate(s, 0, 1.0), std::invalid_argument);
}
