#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "windramp/detectors.hpp"
#include "windramp/ingest.hpp"
#include "windramp/lstm.hpp"
#include "windramp/synth.hpp"
#include "windramp/wavelet.hpp"

namespace windramp::cli {

/// One model to evaluate, e.g. "lstm" run with the multivariate selection.
struct ModelSpec {
    std::string name;    // persistence | arma | arima | lstm
    FeatureSet selection = FeatureSet::Univariate;
};

/// The resolved run configuration. Every field has a default; a config file
/// (INI-style sections) overrides defaults and command-line flags override
/// the file. The resolved form is echoed into the output directory so a run
/// can be reproduced from its artifacts.
struct RunConfig {
    // [data]
    std::string source = "synth"; // synth | csv
    std::string rate = "10min";   // 10min | hourly
    std::string csv_path;
    int resample_min_count = 0;   // 0 = require a full bucket

    // [ingest]
    ColumnMapping mapping;
    FarmConfig farm;

    // [synth]
    SynthConfig synth = default_synth();
    std::string synth_events = "auto"; // auto | none | "mid:dp:dt ..."
    int auto_event_count = 0;          // 0 = derive from length

    static SynthConfig default_synth() {
        SynthConfig s;
        s.phi = {0.8};
        s.sigma = 60.0;
        return s;
    }

    // [wavelet]
    int lambda_min = 2;
    int lambda_max = 0; // 0 = auto by rate (36 for 10min, 6 for hourly)
    double threshold_quantile = 0.9;
    double threshold_abs = 0.0; // > 0 overrides the quantile

    // [split]
    double test_fraction = 0.2;

    // [models]
    std::vector<ModelSpec> models;

    // [model.arma] / [model.arima]
    int arma_p = 3, arma_q = 3;
    int arima_p = 3, arima_d = 1, arima_q = 3;

    // [model.lstm]
    LSTMConfig lstm;

    // [detect]
    std::string detect_definition = "endpoint"; // endpoint | minmax | rate | filtered
    BinaryRampConfig detect;

    // [eval]
    int horizon = 1;

    // [output]
    std::string out_dir = "out";
    std::uint64_t seed = 42;

    /// Effective lambda_max after the rate-dependent default.
    int effective_lambda_max() const;
    ThresholdSpec threshold_spec() const;

    /// Canonical INI rendering (also the fingerprint input).
    std::string to_ini() const;
};

/// Parses INI text (sections, key = value, '#'/';' comments). Unknown keys
/// are collected as errors so typos fail loudly.
RunConfig parse_config(const std::string& ini_text, std::vector<std::string>& errors);

RunConfig load_config_file(const std::string& path, std::vector<std::string>& errors);

/// Parses a model list token such as "arma" or "lstm:multivariate".
std::optional<ModelSpec> parse_model_token(const std::string& token, FeatureSet default_selection);

} // namespace windramp::cli
