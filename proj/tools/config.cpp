#include "config.hpp"

#include <charconv>
#include <sstream>

#include "windramp/io.hpp"
#include "windramp/timeutil.hpp"

namespace windramp::cli {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
    return out;
}

bool parse_double(const std::string& s, double& out) {
    const auto res = std::from_chars(s.c_str(), s.c_str() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.c_str() + s.size();
}

bool parse_int(const std::string& s, std::int64_t& out) {
    const auto res = std::from_chars(s.c_str(), s.c_str() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.c_str() + s.size();
}

} // namespace

int RunConfig::effective_lambda_max() const {
    if (lambda_max > 0) return lambda_max;
    return rate == "hourly" ? 6 : 36;
}

ThresholdSpec RunConfig::threshold_spec() const {
    if (threshold_abs > 0.0) return ThresholdSpec::absolute(threshold_abs);
    return ThresholdSpec::quantile(threshold_quantile);
}

std::optional<ModelSpec> parse_model_token(const std::string& token, FeatureSet default_selection) {
    std::string name = trim(token);
    FeatureSet sel = default_selection;
    const auto colon = name.find(':');
    if (colon != std::string::npos) {
        const std::string suffix = trim(name.substr(colon + 1));
        name = trim(name.substr(0, colon));
        if (suffix == "multivariate")
            sel = FeatureSet::Multivariate;
        else if (suffix == "univariate")
            sel = FeatureSet::Univariate;
        else
            return std::nullopt;
    }
    if (name != "persistence" && name != "arma" && name != "arima" && name != "lstm")
        return std::nullopt;
    // Only the LSTM consumes exogenous features.
    if (name != "lstm") sel = FeatureSet::Univariate;
    return ModelSpec{name, sel};
}

RunConfig parse_config(const std::string& ini_text, std::vector<std::string>& errors) {
    RunConfig cfg;
    cfg.models = {{"persistence", FeatureSet::Univariate},
                  {"arma", FeatureSet::Univariate},
                  {"arima", FeatureSet::Univariate},
                  {"lstm", FeatureSet::Univariate}};

    std::istringstream in(ini_text);
    std::string line, section;
    int line_no = 0;
    std::string events_raw = "auto";
    std::string models_raw;
    bool models_set = false;

    while (std::getline(in, line)) {
        ++line_no;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;
        if (s.front() == '[' && s.back() == ']') {
            section = trim(s.substr(1, s.size() - 2));
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            errors.push_back("line " + std::to_string(line_no) + ": expected key = value");
            continue;
        }
        const std::string key = trim(s.substr(0, eq));
        const std::string val = trim(s.substr(eq + 1));
        const std::string qual = section + "." + key;

        auto want_double = [&](double& slot) {
            double v;
            if (parse_double(val, v))
                slot = v;
            else
                errors.push_back(qual + ": not a number: '" + val + "'");
        };
        auto want_int = [&](int& slot) {
            std::int64_t v;
            if (parse_int(val, v))
                slot = static_cast<int>(v);
            else
                errors.push_back(qual + ": not an integer: '" + val + "'");
        };
        auto want_u64 = [&](std::uint64_t& slot) {
            std::int64_t v;
            if (parse_int(val, v) && v >= 0)
                slot = static_cast<std::uint64_t>(v);
            else
                errors.push_back(qual + ": not a non-negative integer: '" + val + "'");
        };
        auto want_size = [&](std::size_t& slot) {
            std::int64_t v;
            if (parse_int(val, v) && v >= 0)
                slot = static_cast<std::size_t>(v);
            else
                errors.push_back(qual + ": not a non-negative integer: '" + val + "'");
        };
        auto want_char = [&](char& slot) {
            if (val.size() == 1)
                slot = val[0];
            else
                errors.push_back(qual + ": expected a single character");
        };

        if (section == "data") {
            if (key == "source") {
                if (val == "synth" || val == "csv")
                    cfg.source = val;
                else
                    errors.push_back(qual + ": expected synth|csv");
            } else if (key == "rate") {
                if (val == "10min" || val == "hourly")
                    cfg.rate = val;
                else
                    errors.push_back(qual + ": expected 10min|hourly");
            } else if (key == "csv_path") {
                cfg.csv_path = val;
            } else if (key == "resample_min_count") {
                want_int(cfg.resample_min_count);
            } else {
                errors.push_back(qual + ": unknown key");
            }
        } else if (section == "ingest") {
            if (key == "delimiter") want_char(cfg.mapping.delimiter);
            else if (key == "decimal") want_char(cfg.mapping.decimal_separator);
            else if (key == "timestamp_format") cfg.mapping.timestamp_format = val;
            else if (key == "col_timestamp") cfg.mapping.timestamp = val;
            else if (key == "col_turbine") cfg.mapping.turbine_id = val;
            else if (key == "col_ws") cfg.mapping.ws_avg = val;
            else if (key == "col_wa") cfg.mapping.wa_avg = val;
            else if (key == "col_p") cfg.mapping.p_avg = val;
            else if (key == "col_ot") cfg.mapping.ot_avg = val;
            else if (key == "rated_power_kw") want_double(cfg.farm.rated_power);
            else if (key == "cadence_s") {
                std::int64_t v;
                if (parse_int(val, v) && v > 0)
                    cfg.farm.cadence = v;
                else
                    errors.push_back(qual + ": not a positive integer");
            } else if (key == "gap_fill_limit") want_int(cfg.farm.gap_fill_limit);
            else if (key == "aggregation") {
                if (val == "strict")
                    cfg.farm.aggregation = FarmConfig::Aggregation::Strict;
                else if (val == "available")
                    cfg.farm.aggregation = FarmConfig::Aggregation::Available;
                else
                    errors.push_back(qual + ": expected strict|available");
            } else if (key == "expected_turbines") {
                cfg.farm.expected_turbines.clear();
                for (const auto& t : split(val, ','))
                    if (!t.empty()) cfg.farm.expected_turbines.insert(t);
            } else {
                errors.push_back(qual + ": unknown key");
            }
        } else if (section == "synth") {
            if (key == "kind") {
                if (val == "arma") cfg.synth.kind = SynthConfig::Kind::Arma;
                else if (val == "ramp-profile") cfg.synth.kind = SynthConfig::Kind::RampProfile;
                else if (val == "composite") cfg.synth.kind = SynthConfig::Kind::Composite;
                else errors.push_back(qual + ": expected arma|ramp-profile|composite");
            } else if (key == "length") want_size(cfg.synth.length);
            else if (key == "interval_s") {
                std::int64_t v;
                if (parse_int(val, v) && v > 0)
                    cfg.synth.interval = v;
                else
                    errors.push_back(qual + ": not a positive integer");
            } else if (key == "start") {
                const auto ts = parse_iso8601(val);
                if (ts.has_value())
                    cfg.synth.start = *ts;
                else
                    errors.push_back(qual + ": not an ISO-8601 timestamp");
            } else if (key == "base_kw") want_double(cfg.synth.base_level);
            else if (key == "noise_sigma") want_double(cfg.synth.noise_sigma);
            else if (key == "arma_phi") {
                cfg.synth.phi.clear();
                for (const auto& t : split(val, ',')) {
                    double v;
                    if (t.empty()) continue;
                    if (parse_double(t, v)) cfg.synth.phi.push_back(v);
                    else errors.push_back(qual + ": bad coefficient '" + t + "'");
                }
            } else if (key == "arma_theta") {
                cfg.synth.theta.clear();
                for (const auto& t : split(val, ',')) {
                    double v;
                    if (t.empty()) continue;
                    if (parse_double(t, v)) cfg.synth.theta.push_back(v);
                    else errors.push_back(qual + ": bad coefficient '" + t + "'");
                }
            } else if (key == "arma_sigma") want_double(cfg.synth.sigma);
            else if (key == "arma_mean") want_double(cfg.synth.mean);
            else if (key == "events") events_raw = val;
            else if (key == "auto_event_count") want_int(cfg.auto_event_count);
            else if (key == "rated_clip_kw") {
                double v;
                if (parse_double(val, v)) {
                    if (v > 0.0) cfg.synth.rated_power_clip = v;
                    else cfg.synth.rated_power_clip.reset();
                } else {
                    errors.push_back(qual + ": not a number");
                }
            } else {
                errors.push_back(qual + ": unknown key");
            }
        } else if (section == "wavelet") {
            if (key == "lambda_min") want_int(cfg.lambda_min);
            else if (key == "lambda_max") want_int(cfg.lambda_max);
            else if (key == "threshold_quantile") want_double(cfg.threshold_quantile);
            else if (key == "threshold_abs") want_double(cfg.threshold_abs);
            else errors.push_back(qual + ": unknown key");
        } else if (section == "split") {
            if (key == "test_fraction") want_double(cfg.test_fraction);
            else errors.push_back(qual + ": unknown key");
        } else if (section == "models") {
            if (key == "run") {
                models_raw = val;
                models_set = true;
            } else {
                errors.push_back(qual + ": unknown key");
            }
        } else if (section == "model.arma") {
            if (key == "p") want_int(cfg.arma_p);
            else if (key == "q") want_int(cfg.arma_q);
            else errors.push_back(qual + ": unknown key");
        } else if (section == "model.arima") {
            if (key == "p") want_int(cfg.arima_p);
            else if (key == "d") want_int(cfg.arima_d);
            else if (key == "q") want_int(cfg.arima_q);
            else errors.push_back(qual + ": unknown key");
        } else if (section == "model.lstm") {
            if (key == "lags") want_int(cfg.lstm.lags);
            else if (key == "hidden") want_int(cfg.lstm.hidden_size);
            else if (key == "epochs") want_int(cfg.lstm.epochs);
            else if (key == "learning_rate") want_double(cfg.lstm.learning_rate);
            else if (key == "batch_size") want_int(cfg.lstm.batch_size);
            else if (key == "shuffle") {
                if (val == "true" || val == "1") cfg.lstm.shuffle = true;
                else if (val == "false" || val == "0") cfg.lstm.shuffle = false;
                else errors.push_back(qual + ": expected true|false");
            } else errors.push_back(qual + ": unknown key");
        } else if (section == "detect") {
            if (key == "definition") {
                if (val == "endpoint" || val == "minmax" || val == "rate" || val == "filtered")
                    cfg.detect_definition = val;
                else
                    errors.push_back(qual + ": expected endpoint|minmax|rate|filtered");
            } else if (key == "delta_t") want_int(cfg.detect.delta_t);
            else if (key == "p_val") want_double(cfg.detect.p_val);
            else if (key == "p_rr") want_double(cfg.detect.p_rr);
            else if (key == "n_nam") want_int(cfg.detect.n_nam);
            else errors.push_back(qual + ": unknown key");
        } else if (section == "eval") {
            if (key == "horizon") want_int(cfg.horizon);
            else errors.push_back(qual + ": unknown key");
        } else if (section == "output") {
            if (key == "dir") cfg.out_dir = val;
            else if (key == "seed") want_u64(cfg.seed);
            else errors.push_back(qual + ": unknown key");
        } else {
            errors.push_back("unknown section [" + section + "] (key " + key + ")");
        }
    }

    // Synth event list: auto | none | explicit "mid:dp:dt" triples.
    cfg.synth_events = events_raw;
    if (events_raw != "auto" && events_raw != "none") {
        cfg.synth.events.clear();
        std::istringstream ev(events_raw);
        std::string tok;
        while (ev >> tok) {
            const auto parts = split(tok, ':');
            std::int64_t mid = 0, dt = 0;
            double dp = 0.0;
            if (parts.size() != 3 || !parse_int(parts[0], mid) || !parse_double(parts[1], dp) ||
                !parse_int(parts[2], dt) || mid < 0 || dt < 1) {
                errors.push_back("synth.events: bad event '" + tok + "' (want mid:dp:dt)");
                continue;
            }
            cfg.synth.events.push_back(
                {static_cast<std::size_t>(mid), dp, static_cast<int>(dt)});
        }
    }

    if (models_set) {
        cfg.models.clear();
        for (const auto& tok : split(models_raw, ',')) {
            if (tok.empty()) continue;
            const auto spec = parse_model_token(tok, FeatureSet::Univariate);
            if (spec.has_value())
                cfg.models.push_back(*spec);
            else
                errors.push_back("models.run: unknown model '" + tok + "'");
        }
        if (cfg.models.empty()) errors.push_back("models.run: empty model list");
    }

    // Cross-field validation.
    if (cfg.source == "csv" && cfg.csv_path.empty())
        errors.push_back("data.csv_path: required when data.source = csv");
    if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0))
        errors.push_back("split.test_fraction: must be in (0,1)");
    if (cfg.lambda_min < 2) errors.push_back("wavelet.lambda_min: must be >= 2");
    if (cfg.lambda_max != 0 && cfg.lambda_max < cfg.lambda_min)
        errors.push_back("wavelet.lambda_max: must be 0 (auto) or >= lambda_min");
    if (cfg.threshold_abs == 0.0 && !(cfg.threshold_quantile > 0.0 && cfg.threshold_quantile < 1.0))
        errors.push_back("wavelet.threshold_quantile: must be in (0,1)");
    if (cfg.horizon < 1) errors.push_back("eval.horizon: must be >= 1");
    return cfg;
}

RunConfig load_config_file(const std::string& path, std::vector<std::string>& errors) {
    return parse_config(read_file(path), errors);
}

std::string RunConfig::to_ini() const {
    std::string out;
    auto kv = [&](const std::string& k, const std::string& v) { out += k + " = " + v + "\n"; };
    auto kvd = [&](const std::string& k, double v) { kv(k, format_double(v)); };

    out += "[data]\n";
    kv("source", source);
    kv("rate", rate);
    kv("csv_path", csv_path);
    kv("resample_min_count", std::to_string(resample_min_count));
    out += "\n[ingest]\n";
    kv("delimiter", std::string(1, mapping.delimiter));
    kv("decimal", std::string(1, mapping.decimal_separator));
    kv("timestamp_format", mapping.timestamp_format);
    kv("col_timestamp", mapping.timestamp);
    kv("col_turbine", mapping.turbine_id);
    kv("col_ws", mapping.ws_avg);
    kv("col_wa", mapping.wa_avg);
    kv("col_p", mapping.p_avg);
    kv("col_ot", mapping.ot_avg);
    kvd("rated_power_kw", farm.rated_power);
    kv("cadence_s", std::to_string(farm.cadence));
    kv("gap_fill_limit", std::to_string(farm.gap_fill_limit));
    kv("aggregation", farm.aggregation == FarmConfig::Aggregation::Strict ? "strict" : "available");
    std::string turbines;
    for (const auto& t : farm.expected_turbines) {
        if (!turbines.empty()) turbines += ",";
        turbines += t;
    }
    kv("expected_turbines", turbines);
    out += "\n[synth]\n";
    kv("kind", synth.kind == SynthConfig::Kind::Arma          ? "arma"
               : synth.kind == SynthConfig::Kind::RampProfile ? "ramp-profile"
                                                              : "composite");
    kv("length", std::to_string(synth.length));
    kv("interval_s", std::to_string(synth.interval));
    kv("start", format_iso8601(synth.start));
    kvd("base_kw", synth.base_level);
    kvd("noise_sigma", synth.noise_sigma);
    std::string phis, thetas;
    for (double v : synth.phi) {
        if (!phis.empty()) phis += ",";
        phis += format_double(v);
    }
    for (double v : synth.theta) {
        if (!thetas.empty()) thetas += ",";
        thetas += format_double(v);
    }
    kv("arma_phi", phis);
    kv("arma_theta", thetas);
    kvd("arma_sigma", synth.sigma);
    kvd("arma_mean", synth.mean);
    if (synth_events == "auto" || synth_events == "none") {
        kv("events", synth_events);
    } else {
        std::string evs;
        for (const auto& ev : synth.events) {
            if (!evs.empty()) evs += " ";
            evs += std::to_string(ev.midpoint) + ":" + format_double(ev.delta_p) + ":" +
                   std::to_string(ev.delta_t);
        }
        kv("events", evs);
    }
    kv("auto_event_count", std::to_string(auto_event_count));
    kvd("rated_clip_kw", synth.rated_power_clip.value_or(0.0));
    out += "\n[wavelet]\n";
    kv("lambda_min", std::to_string(lambda_min));
    kv("lambda_max", std::to_string(lambda_max));
    kvd("threshold_quantile", threshold_quantile);
    kvd("threshold_abs", threshold_abs);
    out += "\n[split]\n";
    kvd("test_fraction", test_fraction);
    out += "\n[models]\n";
    std::string run;
    for (const auto& m : models) {
        if (!run.empty()) run += ",";
        run += m.name;
        if (m.name == "lstm" && m.selection == FeatureSet::Multivariate) run += ":multivariate";
    }
    kv("run", run);
    out += "\n[model.arma]\n";
    kv("p", std::to_string(arma_p));
    kv("q", std::to_string(arma_q));
    out += "\n[model.arima]\n";
    kv("p", std::to_string(arima_p));
    kv("d", std::to_string(arima_d));
    kv("q", std::to_string(arima_q));
    out += "\n[model.lstm]\n";
    kv("lags", std::to_string(lstm.lags));
    kv("hidden", std::to_string(lstm.hidden_size));
    kv("epochs", std::to_string(lstm.epochs));
    kvd("learning_rate", lstm.learning_rate);
    kv("batch_size", std::to_string(lstm.batch_size));
    kv("shuffle", lstm.shuffle ? "true" : "false");
    out += "\n[detect]\n";
    kv("definition", detect_definition);
    kv("delta_t", std::to_string(detect.delta_t));
    kvd("p_val", detect.p_val);
    kvd("p_rr", detect.p_rr);
    kv("n_nam", std::to_string(detect.n_nam));
    out += "\n[eval]\n";
    kv("horizon", std::to_string(horizon));
    out += "\n[output]\n";
    // The output directory is where artifacts land, not part of what they
    // contain; leaving it out keeps echoes and fingerprints location-free.
    kv("seed", std::to_string(seed));
    return out;
}

} // namespace windramp::cli
