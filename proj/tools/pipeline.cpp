#include "pipeline.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "windramp/arma.hpp"
#include "windramp/io.hpp"
#include "windramp/lstm.hpp"
#include "windramp/rng.hpp"

namespace windramp::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

} // namespace

void resolve_synth_events(RunConfig& cfg) {
    if (cfg.synth.kind == SynthConfig::Kind::Arma) return;
    if (cfg.synth_events == "none") {
        cfg.synth.events.clear();
        return;
    }
    if (cfg.synth_events != "auto") return; // explicit list already parsed

    const std::size_t n = cfg.synth.length;
    int count = cfg.auto_event_count;
    if (count <= 0) count = static_cast<int>(std::max<std::size_t>(1, n / 250));
    Rng rng = Rng(cfg.synth.seed).split(7);
    std::vector<SynthEvent> events;
    // Deterministic placement on an even spacing with seeded jitter keeps
    // events in bounds and non-overlapping.
    const std::size_t stride = n / static_cast<std::size_t>(count + 1);
    if (stride < 30) throw std::runtime_error("synth: series too short for auto events");
    for (int k = 1; k <= count; ++k) {
        SynthEvent ev;
        const std::int64_t jitter = rng.uniform_int(-static_cast<std::int64_t>(stride) / 4,
                                                    static_cast<std::int64_t>(stride) / 4);
        ev.midpoint = static_cast<std::size_t>(static_cast<std::int64_t>(stride) * k + jitter);
        ev.delta_t = static_cast<int>(rng.uniform_int(4, 12));
        const double magnitude = rng.uniform(1500.0, 4000.0);
        ev.delta_p = (rng.uniform01() < 0.5 ? -1.0 : 1.0) * magnitude;
        // Alternate away from the floor: keep the level above zero.
        events.push_back(ev);
    }
    // Keep the running level inside [0, 1.6 * base]: flip signs that would
    // push it out.
    double level = cfg.synth.base_level;
    for (auto& ev : events) {
        if (level + ev.delta_p < 0.2 * cfg.synth.base_level) ev.delta_p = std::fabs(ev.delta_p);
        if (level + ev.delta_p > 2.5 * cfg.synth.base_level) ev.delta_p = -std::fabs(ev.delta_p);
        level += ev.delta_p;
    }
    cfg.synth.events = std::move(events);
}

namespace {

// Synthetic auxiliary weather columns derived from the power series, for
// multivariate runs on generated data: a cube-root power-curve proxy for
// wind speed, a slow random walk for direction, a daily cycle for
// temperature. Deterministic per seed.
FeatureFrame synth_frame(const UniformSeries& power, const SynthConfig& synth) {
    const std::size_t n = power.size();
    const double rated = synth.rated_power_clip.value_or(8200.0);
    Rng ws_rng = Rng(synth.seed).split(11);
    Rng wa_rng = Rng(synth.seed).split(12);
    Rng ot_rng = Rng(synth.seed).split(13);

    std::vector<std::optional<double>> ws(n), wa_sin(n), wa_cos(n), ot(n), pct(n);
    double angle = wa_rng.uniform(0.0, 2.0 * 3.14159265358979323846);
    for (std::size_t i = 0; i < n; ++i) {
        if (!power[i].has_value()) continue;
        const double frac = std::max(0.0, *power[i]) / rated;
        ws[i] = 3.0 + 9.0 * std::cbrt(frac) + 0.3 * ws_rng.gaussian();
        angle += 0.02 * wa_rng.gaussian();
        wa_sin[i] = std::sin(angle);
        wa_cos[i] = std::cos(angle);
        const double day_frac = static_cast<double>(power.timestamp_at(i) % 86400) / 86400.0;
        ot[i] = 10.0 + 5.0 * std::sin(2.0 * 3.14159265358979323846 * day_frac) +
                0.2 * ot_rng.gaussian();
        pct[i] = 100.0 * *power[i] / rated;
    }
    FeatureFrame f;
    f.p_tot = power;
    f.pct_rated = UniformSeries(power.start(), power.interval(), std::move(pct), "%");
    f.ws = UniformSeries(power.start(), power.interval(), std::move(ws), "m/s");
    f.wa_sin = UniformSeries(power.start(), power.interval(), std::move(wa_sin), "");
    f.wa_cos = UniformSeries(power.start(), power.interval(), std::move(wa_cos), "");
    f.ot = UniformSeries(power.start(), power.interval(), std::move(ot), "degC");
    return f;
}

FeatureFrame resample_frame(const FeatureFrame& f, Duration target, int min_count) {
    FeatureFrame out;
    out.p_tot = resample_mean(f.p_tot, target, min_count);
    out.pct_rated = resample_mean(f.pct_rated, target, min_count);
    out.ws = resample_mean(f.ws, target, min_count);
    out.wa_sin = resample_mean(f.wa_sin, target, min_count);
    out.wa_cos = resample_mean(f.wa_cos, target, min_count);
    out.ot = resample_mean(f.ot, target, min_count);
    return out;
}

} // namespace

DataBundle acquire_data(const RunConfig& cfg) {
    DataBundle bundle;
    if (cfg.source == "csv") {
        bundle.from_csv = true;
        RunConfig local = cfg;
        const auto records = parse_scada(cfg.csv_path, local.mapping, bundle.ingest_report);
        const auto turbines = regularize(records, local.farm, bundle.ingest_report);
        bundle.frame = aggregate_farm(turbines, local.farm, bundle.ingest_report);
    } else {
        RunConfig local = cfg;
        local.synth.seed = cfg.seed;
        resolve_synth_events(local);
        const GroundTruth gt = generate(local.synth);
        bundle.frame = synth_frame(gt.series, local.synth);
        bundle.truth_events = gt.events;
    }
    if (cfg.rate == "hourly") {
        const Duration hour = 3600;
        if (bundle.frame.p_tot.interval() < hour) {
            const int ratio = static_cast<int>(hour / bundle.frame.p_tot.interval());
            const int min_count = cfg.resample_min_count > 0 ? cfg.resample_min_count : ratio;
            bundle.frame = resample_frame(bundle.frame, hour, min_count);
        }
    }
    return bundle;
}

namespace {

struct LabelledSplit {
    std::size_t train_len = 0;
    RampFunctionSeries ramp_full;
    RampClassSeries labels_full; // threshold resolved on the training window
};

LabelledSplit label_series(const RunConfig& cfg, const UniformSeries& power) {
    LabelledSplit out;
    const std::size_t n = power.size();
    out.train_len = n - static_cast<std::size_t>(
                            std::floor(static_cast<double>(n) * cfg.test_fraction));
    WaveletConfig wc;
    wc.lambda_min = cfg.lambda_min;
    wc.lambda_max = cfg.effective_lambda_max();
    out.ramp_full = ramp_function(power, wc);

    RampFunctionSeries train_ref;
    train_ref.config = wc;
    train_ref.values.assign(out.ramp_full.values.begin(),
                            out.ramp_full.values.begin() + static_cast<std::ptrdiff_t>(out.train_len));
    out.labels_full = classify(out.ramp_full, cfg.threshold_spec(), train_ref);
    return out;
}

std::string plot_csv(const UniformSeries& power, const LabelledSplit& lab,
                     const std::vector<std::size_t>& rows, const std::vector<double>& pred) {
    std::string out = "timestamp,actual,predicted,ramp_function,ramp_class\n";
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const std::size_t i = rows[k];
        out += format_iso8601(power.timestamp_at(i));
        out += ',';
        if (power[i].has_value()) out += format_double(*power[i]);
        out += ',';
        out += format_double(pred[k]);
        out += ',';
        if (lab.ramp_full.values[i].has_value()) out += format_double(*lab.ramp_full.values[i]);
        out += ',';
        out += to_string(lab.labels_full.labels[i]);
        out += '\n';
    }
    return out;
}

struct ScoredRun {
    std::vector<std::size_t> rows;  // scored test row indices
    std::vector<double> pred;       // aligned predictions
    std::optional<Metrics> train;
    FitReport timing;
    std::optional<int> lags;
};

EvalReport finish_report(const RunConfig& cfg, const ModelSpec& spec, const UniformSeries& power,
                         const LabelledSplit& lab, const ScoredRun& run) {
    std::vector<std::optional<double>> actual;
    RampClassSeries labels;
    labels.threshold = lab.labels_full.threshold;
    actual.reserve(run.rows.size());
    for (std::size_t i : run.rows) {
        actual.push_back(power[i]);
        labels.labels.push_back(lab.labels_full.labels[i]);
    }

    EvalReport rep;
    rep.model = spec.name == "lstm" ? "LSTM-RNN" : spec.name == "arma" ? "ARMA"
                                              : spec.name == "arima"  ? "ARIMA"
                                                                      : "Persistence";
    rep.data_sample_rate = cfg.rate == "hourly" ? "Hourly" : "10 min";
    rep.data_selection = to_string(spec.selection);
    rep.lags = run.lags;
    rep.fit_time_s = run.timing.fit_time_s;
    rep.forecast_time_s = run.timing.forecast_time_s;
    rep.train = run.train;
    rep.test = point_metrics(run.pred, actual);
    rep.ramp = conditioned_metrics(run.pred, actual, labels);
    const double horizon_hours = static_cast<double>(cfg.horizon) *
                                 static_cast<double>(power.interval()) / 3600.0;
    rep.horizon = categorize_horizon(horizon_hours);
    rep.config_fingerprint = fingerprint(cfg.to_ini());
    return rep;
}

std::vector<std::size_t> all_test_rows(std::size_t train_len, std::size_t n) {
    std::vector<std::size_t> rows;
    rows.reserve(n - train_len);
    for (std::size_t i = train_len; i < n; ++i) rows.push_back(i);
    return rows;
}

ScoredRun run_persistence(const RunConfig& cfg, const UniformSeries& power, std::size_t train_len) {
    const auto [train, test] = chronological_split(power, SplitSpec{cfg.test_fraction});
    ScoredRun run;
    const auto t0 = Clock::now();
    if (cfg.horizon == 1) {
        run.pred = rolling_persistence(train, test);
    } else {
        // h-step persistence: the last present value at least h steps back.
        for (std::size_t i = 0; i < test.size(); ++i) {
            const std::size_t global = train.size() + i;
            const std::size_t origin = global - static_cast<std::size_t>(cfg.horizon);
            std::optional<double> last;
            for (std::size_t k = 0; k <= origin; ++k)
                if (power[origin - k].has_value()) {
                    last = power[origin - k];
                    break;
                }
            run.pred.push_back(last.value_or(0.0));
        }
    }
    run.timing.forecast_time_s = seconds_since(t0);
    run.rows = all_test_rows(train_len, power.size());

    // In-sample persistence for the train metrics.
    std::vector<double> train_pred;
    std::vector<std::optional<double>> train_actual;
    for (std::size_t i = 1; i < train.size(); ++i) {
        if (!train[i - 1].has_value()) continue;
        train_pred.push_back(*train[i - 1]);
        train_actual.push_back(train[i]);
    }
    if (!train_pred.empty()) run.train = point_metrics(train_pred, train_actual);
    return run;
}

ScoredRun run_linear(const RunConfig& cfg, const UniformSeries& power, std::size_t train_len,
                     bool integrated) {
    const auto [train_s, test_s] = chronological_split(power, SplitSpec{cfg.test_fraction});
    const std::vector<double> train = train_s.dense_values();
    const std::vector<double> test = test_s.dense_values();

    const int p = integrated ? cfg.arima_p : cfg.arma_p;
    const int d = integrated ? cfg.arima_d : 0;
    const int q = integrated ? cfg.arima_q : cfg.arma_q;

    ScoredRun run;
    run.lags = std::max(p, q);
    auto t0 = Clock::now();
    const ARMAModel model = integrated ? fit_arima(train, p, d, q) : fit_arma(train, p, q);
    run.timing.fit_time_s = seconds_since(t0);

    t0 = Clock::now();
    if (cfg.horizon == 1) {
        run.pred = rolling_one_step(model, train, test);
    } else {
        // Rolling origin, h-step-ahead: forecast h steps from each origin.
        const std::size_t h = static_cast<std::size_t>(cfg.horizon);
        std::vector<double> levels(train.begin(), train.end());
        levels.insert(levels.end(), test.begin(), test.end());
        for (std::size_t i = 0; i < test.size(); ++i) {
            const std::size_t target = train.size() + i;
            if (target < h)
                throw std::runtime_error("evaluate: horizon exceeds available history");
            const std::span<const double> hist(levels.data(), target - h + 1);
            const auto fc = forecast(model, hist, static_cast<int>(h));
            run.pred.push_back(fc.back());
        }
    }
    run.timing.forecast_time_s = seconds_since(t0);
    run.rows = all_test_rows(train_len, power.size());

    const auto in_sample = in_sample_predictions(model, train);
    if (!in_sample.values.empty()) {
        std::vector<std::optional<double>> actual(train.begin() + static_cast<std::ptrdiff_t>(in_sample.offset),
                                                  train.end());
        run.train = point_metrics(in_sample.values, actual);
    }
    return run;
}

ScoredRun run_lstm(const RunConfig& cfg, const FeatureFrame& frame, std::size_t train_len,
                   FeatureSet selection) {
    if (cfg.horizon != 1)
        throw std::runtime_error("evaluate: the LSTM path supports horizon = 1 only");
    std::vector<std::vector<std::optional<double>>> columns;
    columns.push_back(frame.p_tot.values());
    if (selection == FeatureSet::Multivariate) {
        columns.push_back(frame.ws.values());
        columns.push_back(frame.wa_sin.values());
        columns.push_back(frame.wa_cos.values());
        columns.push_back(frame.ot.values());
    }

    // Scaler fitted on training rows only.
    std::vector<std::vector<std::optional<double>>> train_cols;
    for (const auto& col : columns)
        train_cols.emplace_back(col.begin(), col.begin() + static_cast<std::ptrdiff_t>(train_len));
    const Scaler scaler = fit_scaler(train_cols);

    LSTMConfig lc = cfg.lstm;
    lc.seed = cfg.seed;
    lc.features = selection;

    const WindowedDataset all = make_windows(columns, lc.lags, 0, scaler);
    WindowedDataset train_ds = all, test_ds = all;
    train_ds.inputs.clear();
    train_ds.targets.clear();
    train_ds.target_rows.clear();
    test_ds.inputs.clear();
    test_ds.targets.clear();
    test_ds.target_rows.clear();
    for (std::size_t w = 0; w < all.window_count(); ++w) {
        auto& dst = all.target_rows[w] < train_len ? train_ds : test_ds;
        const auto win = all.window(w);
        dst.inputs.insert(dst.inputs.end(), win.begin(), win.end());
        dst.targets.push_back(all.targets[w]);
        dst.target_rows.push_back(all.target_rows[w]);
    }
    if (train_ds.window_count() == 0 || test_ds.window_count() == 0)
        throw std::runtime_error("evaluate: not enough windows for the LSTM run");

    ScoredRun run;
    run.lags = lc.lags;
    auto t0 = Clock::now();
    const auto [params, history] = train(lc, train_ds);
    run.timing.fit_time_s = seconds_since(t0);

    t0 = Clock::now();
    run.pred = predict(params, test_ds);
    run.timing.forecast_time_s = seconds_since(t0);
    run.rows = test_ds.target_rows;

    const std::vector<double> train_pred = predict(params, train_ds);
    std::vector<std::optional<double>> train_actual;
    for (std::size_t r : train_ds.target_rows) train_actual.push_back(frame.p_tot[r]);
    run.train = point_metrics(train_pred, train_actual);
    return run;
}

} // namespace

std::vector<RunResult> run_evaluation(const RunConfig& cfg, const DataBundle& data) {
    const UniformSeries& power = data.frame.p_tot;
    if (power.size() < 10) throw std::runtime_error("evaluate: series too short");
    if (!power.fully_present())
        throw std::runtime_error(
            "evaluate: power series has " +
            std::to_string(power.size() - power.present_count()) +
            " missing slots; raise ingest.gap_fill_limit or clean the input");
    if (static_cast<std::size_t>(cfg.effective_lambda_max()) > power.size())
        throw std::runtime_error("evaluate: series shorter than wavelet lambda_max");

    const LabelledSplit lab = label_series(cfg, power);
    if (static_cast<std::size_t>(cfg.horizon) >= lab.train_len)
        throw std::runtime_error("evaluate: horizon exceeds the training window");

    std::vector<RunResult> results;
    for (const auto& spec : cfg.models) {
        ScoredRun run;
        if (spec.name == "persistence") {
            run = run_persistence(cfg, power, lab.train_len);
        } else if (spec.name == "arma") {
            run = run_linear(cfg, power, lab.train_len, false);
        } else if (spec.name == "arima") {
            run = run_linear(cfg, power, lab.train_len, true);
        } else if (spec.name == "lstm") {
            run = run_lstm(cfg, data.frame, lab.train_len, spec.selection);
        } else {
            throw std::runtime_error("evaluate: unknown model '" + spec.name + "'");
        }
        RunResult rr;
        rr.report = finish_report(cfg, spec, power, lab, run);
        rr.plot_csv = plot_csv(power, lab, run.rows, run.pred);
        results.push_back(std::move(rr));
    }
    return results;
}

} // namespace windramp::cli
