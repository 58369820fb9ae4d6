#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <charconv>
#include <filesystem>

#include "windramp/io.hpp"
#include "windramp/rng.hpp"

using namespace windramp;

TEST_CASE("format_double is shortest round-trip") {
    CHECK(format_double(50.0) == "50");
    CHECK(format_double(3.5) == "3.5");
    CHECK(format_double(0.1) == "0.1");
    Rng rng(9);
    for (int i = 0; i < 200; ++i) {
        const double v = rng.uniform(-1e6, 1e6) * std::pow(10.0, rng.uniform_int(-6, 6));
        const std::string s = format_double(v);
        double back = 0.0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), back);
        REQUIRE(res.ec == std::errc());
        CHECK(back == v);
    }
}

TEST_CASE("series CSV round-trips values, cadence and missing cells") {
    UniformSeries s(1357516800, 600,
                    {std::optional<double>(1.25), std::nullopt, std::optional<double>(-3.0)}, "kW");
    const std::string csv = series_to_csv(s, "P_tot_kW");
    CHECK(csv.find("2013-01-07T00:00:00Z,1.25") != std::string::npos);
    CHECK(csv.find("2013-01-07T00:10:00Z,\n") != std::string::npos); // missing -> empty cell
    const UniformSeries back = series_from_csv(csv, "kW");
    CHECK(back.start() == s.start());
    CHECK(back.interval() == s.interval());
    CHECK(back.values() == s.values());
}

TEST_CASE("series CSV rejects irregular cadence") {
    const std::string csv =
        "timestamp,value\n"
        "2013-01-07T00:00:00Z,1\n"
        "2013-01-07T00:10:00Z,2\n"
        "2013-01-07T00:25:00Z,3\n";
    CHECK_THROWS(series_from_csv(csv));
}

TEST_CASE("events JSON round-trips") {
    std::vector<RampEvent> events;
    RampEvent up;
    up.t0 = 1357516800;
    up.delta_p = 2500.5;
    up.delta_t = 3600;
    up.rate = 2500.5 / 60.0;
    up.direction = +1;
    RampEvent down;
    down.t0 = 1357530000;
    down.delta_p = -1800.0;
    down.delta_t = 1200;
    down.rate = -90.0;
    down.direction = -1;
    events.push_back(up);
    events.push_back(down);
    const auto back = events_from_json(events_to_json(events));
    REQUIRE(back.size() == 2);
    CHECK(back[0].t0 == up.t0);
    CHECK(back[0].delta_p == up.delta_p);
    CHECK(back[0].delta_t == up.delta_t);
    CHECK(back[0].rate == up.rate);
    CHECK(back[0].direction == +1);
    CHECK(back[1].direction == -1);
}

TEST_CASE("atomic writes leave no temp file behind") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "windramp_io_test";
    ;
    fs::create_directories(dir);
    const std::string path = (dir / "artifact.csv").string();
    write_file_atomic(path, "hello\n");
    CHECK(read_file(path) == "hello\n");
    CHECK_FALSE(fs::exists(path + ".tmp"));
    fs::remove_all(dir);
}
