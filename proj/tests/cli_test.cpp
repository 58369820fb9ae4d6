#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <regex>

#include <json.hpp>

#include "cli.hpp"
#include "config.hpp"
#include "windramp/io.hpp"

using namespace windramp;
using windramp::cli::run_cli;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("windramp_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) { return read_file(path); }

// Timing cells are wall-clock readings; mask them before comparing runs.
std::string mask_timings_csv(std::string csv) {
    return std::regex_replace(csv, std::regex("\\b\\d{2,}:\\d{2}\\b"), "MM:SS");
}

std::string mask_timings_json(std::string j) {
    j = std::regex_replace(j, std::regex("\"fit_time_s\": [-0-9.eE+]+"), "\"fit_time_s\": T");
    return std::regex_replace(j, std::regex("\"forecast_time_s\": [-0-9.eE+]+"),
                              "\"forecast_time_s\": T");
}

} // namespace

TEST_CASE("version prints the semantic version and exits 0") {
    CHECK(run_cli({"version"}) == 0);
}

TEST_CASE("usage errors exit 2") {
    CHECK(run_cli({}) == 2);
    CHECK(run_cli({"frobnicate"}) == 2);
    CHECK(run_cli({"evaluate", "--no-such-flag"}) == 2);
}

TEST_CASE("config validation failures exit 1 with itemised messages") {
    TempDir tmp;
    write_file_atomic(tmp.file("bad.ini"), "[split]\ntest_fraction = 1.5\n[nope]\nx = 1\n");
    CHECK(run_cli({"synth", "--config", tmp.file("bad.ini"), "--out", tmp.file("out")}) == 1);
}

TEST_CASE("missing input file exits 1") {
    TempDir tmp;
    write_file_atomic(tmp.file("cfg.ini"),
                      "[data]\nsource = csv\ncsv_path = " + tmp.file("absent.csv") + "\n");
    CHECK(run_cli({"ingest", "--config", tmp.file("cfg.ini"), "--out", tmp.file("out")}) == 1);
    CHECK_FALSE(fs::exists(tmp.file("out/frame.csv")));
}

TEST_CASE("synth emits a series CSV and ground-truth events; reruns are byte-identical") {
    TempDir tmp;
    const std::string out1 = tmp.file("a");
    const std::string out2 = tmp.file("b");
    REQUIRE(run_cli({"synth", "--out", out1, "--seed", "9"}) == 0);
    REQUIRE(run_cli({"synth", "--out", out2, "--seed", "9"}) == 0);
    CHECK(slurp(out1 + "/series.csv") == slurp(out2 + "/series.csv"));
    CHECK(slurp(out1 + "/truth_events.json") == slurp(out2 + "/truth_events.json"));
    CHECK(slurp(out1 + "/resolved_config.ini") == slurp(out2 + "/resolved_config.ini"));

    const UniformSeries s = series_from_csv(slurp(out1 + "/series.csv"));
    CHECK(s.size() == 2000);
    CHECK(s.interval() == 600);

    const std::string out3 = tmp.file("c");
    REQUIRE(run_cli({"synth", "--out", out3, "--seed", "10"}) == 0);
    CHECK(slurp(out1 + "/series.csv") != slurp(out3 + "/series.csv"));
}

TEST_CASE("label emits aligned plot rows and an event list") {
    TempDir tmp;
    const std::string out = tmp.file("out");
    REQUIRE(run_cli({"label", "--out", out, "--seed", "4"}) == 0);
    const std::string csv = slurp(out + "/labels.csv");
    CHECK(csv.rfind("timestamp,power,ramp_function,ramp_class", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2001); // header + one row per point
    const auto events = nlohmann::json::parse(slurp(out + "/events.json"));
    CHECK(events.at("events").is_array());
    CHECK(events.at("events").size() > 0);
}

TEST_CASE("detect emits flags plus summary counts") {
    TempDir tmp;
    const std::string out = tmp.file("out");
    write_file_atomic(tmp.file("cfg.ini"), "[detect]\ndefinition = endpoint\ndelta_t = 6\np_val = 800\n");
    REQUIRE(run_cli({"detect", "--config", tmp.file("cfg.ini"), "--out", out, "--seed", "4"}) == 0);
    const std::string csv = slurp(out + "/detection.csv");
    CHECK(csv.rfind("timestamp,flag,direction", 0) == 0);
    const auto summary = nlohmann::json::parse(slurp(out + "/detection_summary.json"));
    CHECK(summary.at("definition") == "endpoint");
    CHECK(summary.at("positions").get<std::size_t>() == 2000 - 6);
    CHECK(summary.at("ramp_steps").get<std::size_t>() > 0);
}

TEST_CASE("fit writes model files; forecast consumes them") {
    TempDir tmp;
    const std::string out = tmp.file("out");
    write_file_atomic(tmp.file("cfg.ini"), "[models]\nrun = arma\n[eval]\nhorizon = 5\n");
    REQUIRE(run_cli({"fit", "--config", tmp.file("cfg.ini"), "--out", out, "--seed", "4"}) == 0);
    const auto model = nlohmann::json::parse(slurp(out + "/model_arma.json"));
    CHECK(model.at("format") == "windramp-model");
    CHECK(model.at("order").at("p").get<int>() == 3);

    REQUIRE(run_cli({"forecast", "--config", tmp.file("cfg.ini"), "--out", out, "--seed", "4",
                     "--model", "arma"}) == 0);
    const std::string fc = slurp(out + "/forecast_arma.csv");
    CHECK(std::count(fc.begin(), fc.end(), '\n') == 6); // header + 5 horizons
}

TEST_CASE("evaluate produces the report pair and plot data per run") {
    TempDir tmp;
    const std::string out = tmp.file("out");
    write_file_atomic(tmp.file("cfg.ini"),
                      "[synth]\nlength = 600\n"
                      "[models]\nrun = persistence,arma\n"
                      "[model.arma]\np = 2\nq = 1\n");
    REQUIRE(run_cli({"evaluate", "--config", tmp.file("cfg.ini"), "--out", out, "--seed", "4"}) == 0);
    const std::string csv = slurp(out + "/report.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3); // header + two runs
    CHECK(csv.find("Persistence") != std::string::npos);
    CHECK(csv.find("ARMA") != std::string::npos);

    const auto arr = nlohmann::json::parse(slurp(out + "/report.json"));
    REQUIRE(arr.size() == 2);
    CHECK(arr[0].at("config_fingerprint") == arr[1].at("config_fingerprint"));

    const std::string plot = slurp(out + "/plot_Persistence.csv");
    CHECK(plot.rfind("timestamp,actual,predicted,ramp_function,ramp_class", 0) == 0);
    CHECK(std::count(plot.begin(), plot.end(), '\n') == 121); // header + test rows (20%)

    // The echoed config plus version reproduces the run.
    const std::string echoed = slurp(out + "/resolved_config.ini");
    CHECK(echoed.find("# windramp ") == 0);
    CHECK(echoed.find("run = persistence,arma") != std::string::npos);
}

TEST_CASE("evaluate artifacts are reproducible modulo wall-clock timings") {
    TempDir tmp;
    write_file_atomic(tmp.file("cfg.ini"),
                      "[synth]\nlength = 400\n"
                      "[models]\nrun = persistence,arima\n"
                      "[model.arima]\np = 1\nd = 1\nq = 1\n");
    const std::string out1 = tmp.file("a"), out2 = tmp.file("b");
    REQUIRE(run_cli({"evaluate", "--config", tmp.file("cfg.ini"), "--out", out1, "--seed", "6"}) == 0);
    REQUIRE(run_cli({"evaluate", "--config", tmp.file("cfg.ini"), "--out", out2, "--seed", "6"}) == 0);
    CHECK(mask_timings_csv(slurp(out1 + "/report.csv")) ==
          mask_timings_csv(slurp(out2 + "/report.csv")));
    CHECK(mask_timings_json(slurp(out1 + "/report.json")) ==
          mask_timings_json(slurp(out2 + "/report.json")));
    CHECK(slurp(out1 + "/plot_ARIMA.csv") == slurp(out2 + "/plot_ARIMA.csv"));
}

TEST_CASE("report rebuilds report.csv from report.json") {
    TempDir tmp;
    const std::string out = tmp.file("out");
    write_file_atomic(tmp.file("cfg.ini"),
                      "[synth]\nlength = 400\n[models]\nrun = persistence\n");
    REQUIRE(run_cli({"evaluate", "--config", tmp.file("cfg.ini"), "--out", out, "--seed", "6"}) == 0);
    const std::string original = slurp(out + "/report.csv");
    fs::remove(out + "/report.csv");
    REQUIRE(run_cli({"report", "--out", out}) == 0);
    CHECK(slurp(out + "/report.csv") == original);
}

TEST_CASE("flags override the config file") {
    TempDir tmp;
    const std::string out = tmp.file("out");
    write_file_atomic(tmp.file("cfg.ini"),
                      "[synth]\nlength = 500\n[split]\ntest_fraction = 0.2\n"
                      "[models]\nrun = persistence\n");
    REQUIRE(run_cli({"evaluate", "--config", tmp.file("cfg.ini"), "--out", out, "--seed", "3",
                     "--test-fraction", "0.1"}) == 0);
    const std::string plot = slurp(out + "/plot_Persistence.csv");
    CHECK(std::count(plot.begin(), plot.end(), '\n') == 51); // 10% of 500 + header
    const std::string echoed = slurp(out + "/resolved_config.ini");
    CHECK(echoed.find("test_fraction = 0.1") != std::string::npos);
}

TEST_CASE("ingest subcommand: CSV in, frame and exact bookkeeping out") {
    TempDir tmp;
    const std::string out = tmp.file("out");
    std::string csv = "Date_time,Wind_turbine_name,Ws_avg,Wa_avg,P_avg,Ot_avg\n";
    for (int t = 0; t < 12; ++t)
        for (int k = 0; k < 2; ++k) {
            char ts[40];
            std::snprintf(ts, sizeof(ts), "2013-01-07 00:%02d:00", t * 10 % 60);
            csv += std::string("2013-01-07 ") + (t < 6 ? "00" : "01") + ":" +
                   std::to_string((t % 6) * 10 + 10).substr(0, 2) + ":00,T" + std::to_string(k) +
                   ",7.0,200.0," + std::to_string(500 + 10 * t) + ".0,9.5\n";
        }
    csv += "broken line\n";
    write_file_atomic(tmp.file("scada.csv"), csv);
    write_file_atomic(tmp.file("cfg.ini"),
                      "[data]\nsource = csv\ncsv_path = " + tmp.file("scada.csv") + "\n");
    REQUIRE(run_cli({"ingest", "--config", tmp.file("cfg.ini"), "--out", out}) == 0);
    const auto report = nlohmann::json::parse(slurp(out + "/ingest_report.json"));
    CHECK(report.at("rows_read").get<std::size_t>() == 25);
    CHECK(report.at("rows_accepted").get<std::size_t>() + report.at("rows_rejected").get<std::size_t>() ==
          25);
    const FeatureFrame frame = frame_from_csv(slurp(out + "/frame.csv"));
    CHECK(frame.size() > 0);
}

TEST_CASE("fit + forecast round-trip for the lstm") {
    TempDir tmp;
    const std::string out = tmp.file("out");
    write_file_atomic(tmp.file("cfg.ini"),
                      "[synth]\nlength = 300\n[models]\nrun = lstm\n"
                      "[model.lstm]\nepochs = 3\nhidden = 4\n[eval]\nhorizon = 3\n");
    REQUIRE(run_cli({"fit", "--config", tmp.file("cfg.ini"), "--out", out, "--seed", "5"}) == 0);
    CHECK(fs::exists(out + "/model_lstm.json"));
    REQUIRE(run_cli({"forecast", "--config", tmp.file("cfg.ini"), "--out", out, "--seed", "5",
                     "--model", "lstm"}) == 0);
    const std::string fc = slurp(out + "/forecast_lstm.csv");
    CHECK(std::count(fc.begin(), fc.end(), '\n') == 4); // header + 3 iterated steps
}

TEST_CASE("evaluate supports hourly resampling") {
    TempDir tmp;
    const std::string out = tmp.file("out");
    write_file_atomic(tmp.file("cfg.ini"),
                      "[synth]\nlength = 1800\n[models]\nrun = persistence,arma\n"
                      "[model.arma]\np = 2\nq = 1\n");
    REQUIRE(run_cli({"evaluate", "--config", tmp.file("cfg.ini"), "--out", out, "--seed", "8",
                     "--rate", "hourly"}) == 0);
    const std::string csv = slurp(out + "/report.csv");
    CHECK(csv.find("Persistence,Hourly,") != std::string::npos);
    // 1800 ten-minute points collapse to 300 hourly points; 20% test = 60 rows.
    const std::string plot = slurp(out + "/plot_Persistence.csv");
    CHECK(std::count(plot.begin(), plot.end(), '\n') == 61);
}

TEST_CASE("evaluate supports rolling-origin horizon-h prediction") {
    TempDir tmp;
    const std::string out = tmp.file("out");
    write_file_atomic(tmp.file("cfg.ini"),
                      "[synth]\nlength = 500\n[models]\nrun = persistence,arima\n"
                      "[model.arima]\np = 1\nd = 1\nq = 0\n"
                      "[eval]\nhorizon = 3\n");
    REQUIRE(run_cli({"evaluate", "--config", tmp.file("cfg.ini"), "--out", out, "--seed", "8"}) == 0);
    const auto arr = nlohmann::json::parse(slurp(out + "/report.json"));
    REQUIRE(arr.size() == 2);
    // Three-step-ahead errors exceed one-step errors for the same data.
    const std::string out1 = tmp.file("h1");
    write_file_atomic(tmp.file("cfg1.ini"),
                      "[synth]\nlength = 500\n[models]\nrun = persistence\n");
    REQUIRE(run_cli({"evaluate", "--config", tmp.file("cfg1.ini"), "--out", out1, "--seed", "8"}) ==
            0);
    const auto one = nlohmann::json::parse(slurp(out1 + "/report.json"));
    CHECK(arr[0].at("test").at("mae").get<double>() > one[0].at("test").at("mae").get<double>());
}

TEST_CASE("evaluate accepts an lstm multivariate run on synthetic features") {
    TempDir tmp;
    const std::string out = tmp.file("out");
    write_file_atomic(tmp.file("cfg.ini"),
                      "[synth]\nlength = 400\n"
                      "[models]\nrun = lstm:multivariate\n"
                      "[model.lstm]\nepochs = 5\nhidden = 8\n");
    REQUIRE(run_cli({"evaluate", "--config", tmp.file("cfg.ini"), "--out", out, "--seed", "2"}) == 0);
    const std::string csv = slurp(out + "/report.csv");
    CHECK(csv.find("LSTM-RNN,10 min,Multivariate,1,") != std::string::npos);
    CHECK(fs::exists(out + "/plot_LSTM-RNN_multivariate.csv"));
}
