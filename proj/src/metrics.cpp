#include "windramp/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include <json.hpp>

namespace windramp {

const char* to_string(HorizonCategory c) {
    switch (c) {
        case HorizonCategory::VeryShort: return "very-short";
        case HorizonCategory::Short: return "short";
        default: return "medium";
    }
}

const char* horizon_bounds(HorizonCategory c) {
    switch (c) {
        case HorizonCategory::VeryShort: return "2 - 4/9 hours";
        case HorizonCategory::Short: return "4/9 - 48/72 hours";
        default: return "72 hours - 7 days";
    }
}

HorizonCategory categorize_horizon(double hours) {
    if (hours <= 9.0) return HorizonCategory::VeryShort;
    if (hours <= 72.0) return HorizonCategory::Short;
    return HorizonCategory::Medium;
}

Metrics point_metrics(std::span<const double> pred,
                      std::span<const std::optional<double>> actual) {
    if (pred.size() != actual.size())
        throw std::invalid_argument("point_metrics: pred and actual lengths differ");
    if (pred.empty()) throw std::invalid_argument("point_metrics: empty inputs");
    double abs_sum = 0.0, sq_sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (!actual[i].has_value()) continue;
        const double d = pred[i] - *actual[i];
        abs_sum += std::fabs(d);
        sq_sum += d * d;
        ++n;
    }
    if (n == 0) throw std::invalid_argument("point_metrics: no scoreable pairs");
    Metrics m;
    m.n = n;
    m.mae = abs_sum / static_cast<double>(n);
    m.rmse = std::sqrt(sq_sum / static_cast<double>(n));
    return m;
}

Metrics point_metrics(std::span<const double> pred, std::span<const double> actual) {
    std::vector<std::optional<double>> a(actual.begin(), actual.end());
    return point_metrics(pred, a);
}

RampConditionedMetrics conditioned_metrics(std::span<const double> pred,
                                           std::span<const std::optional<double>> actual,
                                           const RampClassSeries& labels) {
    if (labels.size() != actual.size())
        throw std::invalid_argument("conditioned_metrics: labels not aligned to actuals");
    if (pred.size() != actual.size())
        throw std::invalid_argument("conditioned_metrics: pred and actual lengths differ");

    struct Acc {
        double abs_sum = 0.0, sq_sum = 0.0;
        std::size_t n = 0;
    };
    Acc acc[3];
    for (std::size_t i = 0; i < pred.size(); ++i) {
        if (!actual[i].has_value()) continue;
        const double d = pred[i] - *actual[i];
        Acc& a = acc[static_cast<int>(labels.labels[i])];
        a.abs_sum += std::fabs(d);
        a.sq_sum += d * d;
        ++a.n;
    }
    auto to_metrics = [](const Acc& a) -> std::optional<Metrics> {
        if (a.n == 0) return std::nullopt;
        Metrics m;
        m.n = a.n;
        m.mae = a.abs_sum / static_cast<double>(a.n);
        m.rmse = std::sqrt(a.sq_sum / static_cast<double>(a.n));
        return m;
    };
    RampConditionedMetrics out;
    out.none = to_metrics(acc[static_cast<int>(RampClass::None)]);
    out.up = to_metrics(acc[static_cast<int>(RampClass::Up)]);
    out.down = to_metrics(acc[static_cast<int>(RampClass::Down)]);
    return out;
}

std::string format_mmss(double seconds) {
    const long long total = static_cast<long long>(std::llround(seconds));
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%02lld:%02lld", total / 60, total % 60);
    return buf;
}

namespace {

std::string two_dec(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

std::string opt_two_dec(const std::optional<Metrics>& m, bool rmse) {
    if (!m.has_value()) return "-";
    return two_dec(rmse ? m->rmse : m->mae);
}

} // namespace

std::string report_csv_header() {
    return "Model,Data sample rate,Data selection,Lags,Fit time (mm:ss),Forecast time (mm:ss),"
           "Train RMSE,Test RMSE,Train MAE,Test MAE,"
           "Positive ramp acc. (RMSE),Positive ramp acc. (MAE),"
           "Negative ramp acc. (RMSE),Negative ramp acc. (MAE),"
           "Non-ramp acc. (RMSE),Non-ramp acc. (MAE)";
}

std::string report_csv_row(const EvalReport& r) {
    std::string row;
    row += r.model;
    row += ',';
    row += r.data_sample_rate;
    row += ',';
    row += r.data_selection;
    row += ',';
    row += r.lags.has_value() ? std::to_string(*r.lags) : std::string("-");
    row += ',';
    row += format_mmss(r.fit_time_s);
    row += ',';
    row += format_mmss(r.forecast_time_s);
    row += ',';
    row += r.train.has_value() ? two_dec(r.train->rmse) : std::string("-");
    row += ',';
    row += two_dec(r.test.rmse);
    row += ',';
    row += r.train.has_value() ? two_dec(r.train->mae) : std::string("-");
    row += ',';
    row += two_dec(r.test.mae);
    row += ',';
    row += opt_two_dec(r.ramp.up, true);
    row += ',';
    row += opt_two_dec(r.ramp.up, false);
    row += ',';
    row += opt_two_dec(r.ramp.down, true);
    row += ',';
    row += opt_two_dec(r.ramp.down, false);
    row += ',';
    row += opt_two_dec(r.ramp.none, true);
    row += ',';
    row += opt_two_dec(r.ramp.none, false);
    return row;
}

namespace {

nlohmann::json metrics_json(const Metrics& m) {
    return {{"mae", m.mae}, {"rmse", m.rmse}, {"n", m.n}};
}

Metrics metrics_from(const nlohmann::json& j) {
    Metrics m;
    m.mae = j.at("mae").get<double>();
    m.rmse = j.at("rmse").get<double>();
    m.n = j.at("n").get<std::size_t>();
    return m;
}

} // namespace

std::string report_json(const EvalReport& r) {
    nlohmann::json j;
    j["model"] = r.model;
    j["data_sample_rate"] = r.data_sample_rate;
    j["data_selection"] = r.data_selection;
    if (r.lags.has_value())
        j["lags"] = *r.lags;
    else
        j["lags"] = nullptr;
    j["fit_time_s"] = r.fit_time_s;
    j["forecast_time_s"] = r.forecast_time_s;
    j["train"] = r.train.has_value() ? metrics_json(*r.train) : nlohmann::json(nullptr);
    j["test"] = metrics_json(r.test);
    nlohmann::json ramp;
    ramp["up"] = r.ramp.up.has_value() ? metrics_json(*r.ramp.up) : nlohmann::json(nullptr);
    ramp["down"] = r.ramp.down.has_value() ? metrics_json(*r.ramp.down) : nlohmann::json(nullptr);
    ramp["none"] = r.ramp.none.has_value() ? metrics_json(*r.ramp.none) : nlohmann::json(nullptr);
    j["ramp"] = ramp;
    j["horizon_category"] = to_string(r.horizon);
    j["horizon_bounds"] = horizon_bounds(r.horizon);
    j["config_fingerprint"] = r.config_fingerprint;
    return j.dump(2);
}

EvalReport report_from_json(const std::string& json_text) {
    const nlohmann::json j = nlohmann::json::parse(json_text);
    EvalReport r;
    r.model = j.at("model").get<std::string>();
    r.data_sample_rate = j.at("data_sample_rate").get<std::string>();
    r.data_selection = j.at("data_selection").get<std::string>();
    if (!j.at("lags").is_null()) r.lags = j.at("lags").get<int>();
    r.fit_time_s = j.at("fit_time_s").get<double>();
    r.forecast_time_s = j.at("forecast_time_s").get<double>();
    if (!j.at("train").is_null()) r.train = metrics_from(j.at("train"));
    r.test = metrics_from(j.at("test"));
    const auto& ramp = j.at("ramp");
    if (!ramp.at("up").is_null()) r.ramp.up = metrics_from(ramp.at("up"));
    if (!ramp.at("down").is_null()) r.ramp.down = metrics_from(ramp.at("down"));
    if (!ramp.at("none").is_null()) r.ramp.none = metrics_from(ramp.at("none"));
    const std::string h = j.at("horizon_category").get<std::string>();
    r.horizon = h == "very-short" ? HorizonCategory::VeryShort
                : h == "short"    ? HorizonCategory::Short
                                  : HorizonCategory::Medium;
    r.config_fingerprint = j.at("config_fingerprint").get<std::string>();
    return r;
}

std::string fingerprint(const std::string& text) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace windramp
