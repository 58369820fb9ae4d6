#include "cli.hpp"

#include <chrono>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "config.hpp"
#include "pipeline.hpp"
#include "windramp/arma.hpp"
#include "windramp/detectors.hpp"
#include "windramp/io.hpp"
#include "windramp/lstm.hpp"
#include "windramp/version.hpp"

namespace windramp::cli {

namespace {

namespace fs = std::filesystem;

std::string out_path(const RunConfig& cfg, const std::string& name) {
    return (fs::path(cfg.out_dir) / name).string();
}

void echo_config(const RunConfig& cfg) {
    fs::create_directories(cfg.out_dir);
    const std::string body = std::string("# windramp ") + kVersion + "\n" + cfg.to_ini();
    write_file_atomic(out_path(cfg, "resolved_config.ini"), body);
}

int cmd_version() {
    std::cout << "windramp " << kVersion << "\n";
    return 0;
}

int cmd_synth(const RunConfig& cfg_in) {
    RunConfig cfg = cfg_in;
    cfg.synth.seed = cfg.seed;
    resolve_synth_events(cfg);
    const GroundTruth gt = generate(cfg.synth);
    echo_config(cfg);
    write_file_atomic(out_path(cfg, "series.csv"), series_to_csv(gt.series, "P_tot_kW"));
    write_file_atomic(out_path(cfg, "truth_events.json"), events_to_json(gt.events));
    std::cout << "synth: " << gt.series.size() << " points, " << gt.events.size()
              << " injected events -> " << cfg.out_dir << "\n";
    return 0;
}

int cmd_ingest(const RunConfig& cfg) {
    if (cfg.csv_path.empty())
        throw std::runtime_error("ingest: set data.csv_path (or data.source = csv)");
    IngestReport report;
    const auto records = parse_scada(cfg.csv_path, cfg.mapping, report);
    const auto turbines = regularize(records, cfg.farm, report);
    const FeatureFrame frame = aggregate_farm(turbines, cfg.farm, report);
    echo_config(cfg);
    write_file_atomic(out_path(cfg, "frame.csv"), frame_to_csv(frame));
    write_file_atomic(out_path(cfg, "ingest_report.json"), report.to_json());
    std::cout << "ingest: " << report.rows_accepted << " accepted, " << report.rows_rejected
              << " rejected over " << turbines.size() << " turbines -> " << cfg.out_dir << "\n";
    return 0;
}

int cmd_label(const RunConfig& cfg) {
    const DataBundle data = acquire_data(cfg);
    const UniformSeries& power = data.frame.p_tot;
    WaveletConfig wc;
    wc.lambda_min = cfg.lambda_min;
    wc.lambda_max = cfg.effective_lambda_max();
    const RampFunctionSeries ramp = ramp_function(power, wc);
    const RampClassSeries labels = classify(ramp, cfg.threshold_spec());
    const EventExtraction extraction = extract_events(labels, power);
    echo_config(cfg);
    write_file_atomic(out_path(cfg, "labels.csv"), label_to_csv(power, ramp, labels));
    write_file_atomic(out_path(cfg, "events.json"), events_to_json(extraction.events, &extraction));
    std::cout << "label: threshold " << labels.threshold << ", " << extraction.events.size()
              << " events -> " << cfg.out_dir << "\n";
    return 0;
}

int cmd_detect(const RunConfig& cfg) {
    const DataBundle data = acquire_data(cfg);
    const UniformSeries& power = data.frame.p_tot;
    BinaryDetection det;
    if (cfg.detect_definition == "endpoint") {
        det = detect_endpoint(power, cfg.detect.delta_t, cfg.detect.p_val);
    } else if (cfg.detect_definition == "minmax") {
        det = detect_minmax(power, cfg.detect.delta_t, cfg.detect.p_val);
    } else if (cfg.detect_definition == "rate") {
        det = detect_rate(power, cfg.detect.delta_t, cfg.detect.p_rr);
    } else {
        det = detect_filtered(power, cfg.detect.n_nam, cfg.detect.p_val);
    }
    echo_config(cfg);
    write_file_atomic(out_path(cfg, "detection.csv"), detection_to_csv(det, power));
    write_file_atomic(out_path(cfg, "detection_summary.json"),
                      detection_summary_json(cfg.detect_definition, det));
    std::cout << "detect[" << cfg.detect_definition << "]: " << det.ramp_count() << " ramp steps of "
              << det.evaluable_count() << " evaluable -> " << cfg.out_dir << "\n";
    return 0;
}

// Columns for an LSTM fit, univariate or the standard physical feature set.
std::vector<std::vector<std::optional<double>>> lstm_columns(const FeatureFrame& frame,
                                                             FeatureSet selection) {
    std::vector<std::vector<std::optional<double>>> columns;
    columns.push_back(frame.p_tot.values());
    if (selection == FeatureSet::Multivariate) {
        columns.push_back(frame.ws.values());
        columns.push_back(frame.wa_sin.values());
        columns.push_back(frame.wa_cos.values());
        columns.push_back(frame.ot.values());
    }
    return columns;
}

int cmd_fit(const RunConfig& cfg) {
    const DataBundle data = acquire_data(cfg);
    const UniformSeries& power = data.frame.p_tot;

    // Fit everything before touching the output slots, so a failed fit
    // leaves no partial model set behind.
    std::vector<std::pair<std::string, std::string>> staged;
    std::vector<FitReport> timings;
    for (const auto& spec : cfg.models) {
        std::string file = "model_" + spec.name;
        if (spec.name == "lstm" && spec.selection == FeatureSet::Multivariate) file += "_multivariate";
        file += ".json";
        FitReport timing;
        const auto t0 = std::chrono::steady_clock::now();
        if (spec.name == "persistence") {
            nlohmann::json j{{"format", "windramp-model"}, {"version", 1}, {"type", "persistence"}};
            staged.emplace_back(file, j.dump(2));
        } else if (spec.name == "arma") {
            const ARMAModel m = fit_arma(power.dense_values(), cfg.arma_p, cfg.arma_q);
            staged.emplace_back(file, arma_to_json(m));
        } else if (spec.name == "arima") {
            const ARMAModel m = fit_arima(power.dense_values(), cfg.arima_p, cfg.arima_d, cfg.arima_q);
            staged.emplace_back(file, arma_to_json(m));
        } else {
            const auto columns = lstm_columns(data.frame, spec.selection);
            const Scaler scaler = fit_scaler(columns);
            LSTMConfig lc = cfg.lstm;
            lc.seed = cfg.seed;
            lc.features = spec.selection;
            const WindowedDataset ds = make_windows(columns, lc.lags, 0, scaler);
            auto [params, history] = train(lc, ds);
            LSTMModelFile mf{std::move(params), lc, scaler, 0};
            staged.emplace_back(file, lstm_to_json(mf));
        }
        timing.fit_time_s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        timings.push_back(timing);
    }
    echo_config(cfg);
    for (std::size_t i = 0; i < staged.size(); ++i) {
        write_file_atomic(out_path(cfg, staged[i].first), staged[i].second);
        std::cout << "fit: wrote " << staged[i].first << " ("
                  << format_mmss(timings[i].fit_time_s) << ")\n";
    }
    return 0;
}

int cmd_forecast(const RunConfig& cfg) {
    if (cfg.models.size() != 1)
        throw std::runtime_error("forecast: pick exactly one model (--model NAME)");
    const ModelSpec spec = cfg.models.front();
    const DataBundle data = acquire_data(cfg);
    const UniformSeries& power = data.frame.p_tot;
    const int horizon = cfg.horizon;

    std::vector<double> values;
    if (spec.name == "persistence") {
        values = persistence_forecast(power, horizon);
    } else if (spec.name == "arma" || spec.name == "arima") {
        const std::string file = out_path(cfg, "model_" + spec.name + ".json");
        const ARMAModel model = arma_from_json(read_file(file));
        values = forecast(model, power.dense_values(), horizon);
    } else {
        std::string file = "model_lstm";
        if (spec.selection == FeatureSet::Multivariate) file += "_multivariate";
        const LSTMModelFile mf = lstm_from_json(read_file(out_path(cfg, file + ".json")));
        const auto columns = lstm_columns(data.frame, mf.config.features);
        if (mf.config.features == FeatureSet::Multivariate && horizon > 1)
            throw std::runtime_error(
                "forecast: multivariate lstm supports horizon = 1 (no future exogenous values)");
        // Iterated one-step forecasts on the scaled target history.
        std::vector<std::vector<std::optional<double>>> cols = columns;
        if (cols[0].size() < static_cast<std::size_t>(mf.config.lags))
            throw std::runtime_error("forecast: series shorter than the model's lag window");
        for (int h = 0; h < horizon; ++h) {
            const std::size_t n = cols[0].size();
            std::vector<double> window;
            for (std::size_t r = n - static_cast<std::size_t>(mf.config.lags); r < n; ++r)
                for (std::size_t f = 0; f < cols.size(); ++f) {
                    if (!cols[f][r].has_value())
                        throw std::runtime_error("forecast: missing values in the final window");
                    window.push_back(mf.scaler.apply(f, *cols[f][r]));
                }
            const double scaled = forward(mf.params, window);
            const double kw = mf.scaler.invert(mf.target_feature, scaled);
            values.push_back(kw);
            cols[0].push_back(kw);
        }
    }

    std::string csv = "timestamp,forecast\n";
    const Timestamp end = power.timestamp_at(power.size());
    for (std::size_t h = 0; h < values.size(); ++h) {
        csv += format_iso8601(end + static_cast<Timestamp>(h) * power.interval());
        csv += ',';
        csv += format_double(values[h]);
        csv += '\n';
    }
    echo_config(cfg);
    const std::string file = "forecast_" + spec.name + ".csv";
    write_file_atomic(out_path(cfg, file), csv);
    std::cout << "forecast: " << values.size() << " steps -> " << file << "\n";
    return 0;
}

int cmd_evaluate(const RunConfig& cfg) {
    const DataBundle data = acquire_data(cfg);
    const std::vector<RunResult> results = run_evaluation(cfg, data);

    std::string csv = report_csv_header() + "\n";
    nlohmann::json arr = nlohmann::json::array();
    echo_config(cfg);
    for (const auto& rr : results) {
        csv += report_csv_row(rr.report) + "\n";
        arr.push_back(nlohmann::json::parse(report_json(rr.report)));
        std::string plot = "plot_" + rr.report.model;
        if (rr.report.data_selection == "Multivariate") plot += "_multivariate";
        plot += ".csv";
        for (auto& c : plot)
            if (c == ' ') c = '_';
        write_file_atomic(out_path(cfg, plot), rr.plot_csv);
    }
    write_file_atomic(out_path(cfg, "report.csv"), csv);
    write_file_atomic(out_path(cfg, "report.json"), arr.dump(2));
    if (data.from_csv)
        write_file_atomic(out_path(cfg, "ingest_report.json"), data.ingest_report.to_json());
    std::cout << "evaluate: " << results.size() << " model runs -> " << out_path(cfg, "report.csv")
              << "\n";
    for (const auto& rr : results)
        std::cout << "  " << rr.report.model << " (" << rr.report.data_selection
                  << "): test MAE " << rr.report.test.mae << ", RMSE " << rr.report.test.rmse << "\n";
    return 0;
}

int cmd_report(const RunConfig& cfg) {
    const std::string json_text = read_file(out_path(cfg, "report.json"));
    const nlohmann::json arr = nlohmann::json::parse(json_text);
    std::string csv = report_csv_header() + "\n";
    for (const auto& item : arr) csv += report_csv_row(report_from_json(item.dump())) + "\n";
    write_file_atomic(out_path(cfg, "report.csv"), csv);
    std::cout << "report: rebuilt " << out_path(cfg, "report.csv") << " (" << arr.size()
              << " rows)\n";
    return 0;
}

} // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"wind power ramp characterisation and forecasting"};
    app.fallthrough();

    std::string config_path, out_dir, rate, selection = "univariate";
    std::vector<std::string> model_tokens;
    std::int64_t seed = -1;
    int lambda_max = -1;
    double threshold_quantile = -1.0, test_fraction = -1.0;

    app.add_option("--config", config_path, "run configuration file (INI)");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--seed", seed, "global random seed");
    app.add_option("--model", model_tokens, "model to run (repeatable)");
    app.add_option("--rate", rate, "data sample rate")->check(CLI::IsMember({"10min", "hourly"}));
    app.add_option("--selection", selection, "feature selection for the lstm")
        ->check(CLI::IsMember({"univariate", "multivariate"}));
    app.add_option("--lambda-max", lambda_max, "maximum wavelet scale");
    app.add_option("--threshold-quantile", threshold_quantile, "ramp threshold quantile");
    app.add_option("--test-fraction", test_fraction, "chronological holdout fraction");

    auto* sub_ingest = app.add_subcommand("ingest", "parse SCADA CSV into a feature frame");
    auto* sub_synth = app.add_subcommand("synth", "generate synthetic data with ground truth");
    auto* sub_label = app.add_subcommand("label", "compute the ramp function and class labels");
    auto* sub_detect = app.add_subcommand("detect", "run a binary ramp detector");
    auto* sub_fit = app.add_subcommand("fit", "fit forecasting models");
    auto* sub_forecast = app.add_subcommand("forecast", "forecast from a fitted model");
    auto* sub_evaluate = app.add_subcommand("evaluate", "end-to-end model evaluation report");
    auto* sub_report = app.add_subcommand("report", "rebuild report.csv from report.json");
    auto* sub_version = app.add_subcommand("version", "print the version");
    app.require_subcommand(1);

    std::vector<const char*> argv;
    argv.push_back("windramp");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n" << app.help();
        return 2;
    }

    if (sub_version->parsed()) return cmd_version();

    std::vector<std::string> errors;
    RunConfig cfg = config_path.empty() ? parse_config("", errors)
                                        : load_config_file(config_path, errors);

    // Flags override the file.
    const FeatureSet default_sel =
        selection == "multivariate" ? FeatureSet::Multivariate : FeatureSet::Univariate;
    if (!model_tokens.empty()) {
        cfg.models.clear();
        for (const auto& tok : model_tokens) {
            const auto spec = parse_model_token(tok, default_sel);
            if (spec.has_value())
                cfg.models.push_back(*spec);
            else
                errors.push_back("--model: unknown model '" + tok + "'");
        }
    } else if (selection == "multivariate") {
        for (auto& m : cfg.models)
            if (m.name == "lstm") m.selection = FeatureSet::Multivariate;
    }
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    if (!rate.empty()) cfg.rate = rate;
    if (lambda_max >= 0) {
        if (lambda_max != 0 && lambda_max < cfg.lambda_min)
            errors.push_back("--lambda-max: must be 0 (auto) or >= lambda_min");
        else
            cfg.lambda_max = lambda_max;
    }
    if (threshold_quantile >= 0.0) {
        if (threshold_quantile > 0.0 && threshold_quantile < 1.0)
            cfg.threshold_quantile = threshold_quantile;
        else
            errors.push_back("--threshold-quantile: must be in (0,1)");
    }
    if (test_fraction >= 0.0) {
        if (test_fraction > 0.0 && test_fraction < 1.0)
            cfg.test_fraction = test_fraction;
        else
            errors.push_back("--test-fraction: must be in (0,1)");
    }

    if (!errors.empty()) {
        std::cerr << "configuration errors:\n";
        for (const auto& e : errors) std::cerr << "  - " << e << "\n";
        return 1;
    }

    try {
        if (sub_ingest->parsed()) return cmd_ingest(cfg);
        if (sub_synth->parsed()) return cmd_synth(cfg);
        if (sub_label->parsed()) return cmd_label(cfg);
        if (sub_detect->parsed()) return cmd_detect(cfg);
        if (sub_fit->parsed()) return cmd_fit(cfg);
        if (sub_forecast->parsed()) return cmd_forecast(cfg);
        if (sub_evaluate->parsed()) return cmd_evaluate(cfg);
        if (sub_report->parsed()) return cmd_report(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cerr << "no subcommand\n";
    return 2;
}

} // namespace windramp::cli
