#include "windramp/io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace windramp {

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
        out << content;
        if (!out) throw std::runtime_error("write failed for '" + tmp + "'");
    }
    std::filesystem::rename(tmp, path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::optional<double> parse_opt(const std::string& s) {
    if (s.empty()) return std::nullopt;
    double v = 0.0;
    const auto res = std::from_chars(s.c_str(), s.c_str() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.c_str() + s.size())
        throw std::runtime_error("bad numeric cell '" + s + "'");
    return v;
}

void append_opt(std::string& out, const std::optional<double>& v) {
    if (v.has_value()) out += format_double(*v);
}

} // namespace

std::string series_to_csv(const UniformSeries& series, const std::string& value_header) {
    std::string out = "timestamp," + value_header + "\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        out += format_iso8601(series.timestamp_at(i));
        out += ',';
        append_opt(out, series[i]);
        out += '\n';
    }
    return out;
}

UniformSeries series_from_csv(const std::string& csv_text, const std::string& unit) {
    std::istringstream in(csv_text);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("series csv: empty");
    std::vector<std::optional<double>> values;
    Timestamp start = 0, prev = 0;
    Duration interval = 0;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv(line);
        if (cells.size() < 2) throw std::runtime_error("series csv: bad row '" + line + "'");
        const auto ts = parse_iso8601(cells[0]);
        if (!ts.has_value()) throw std::runtime_error("series csv: bad timestamp '" + cells[0] + "'");
        if (row == 0) {
            start = *ts;
        } else if (row == 1) {
            interval = *ts - prev;
            if (interval <= 0) throw std::runtime_error("series csv: non-increasing timestamps");
        } else if (*ts - prev != interval) {
            throw std::runtime_error("series csv: irregular cadence at row " + std::to_string(row));
        }
        prev = *ts;
        values.push_back(parse_opt(cells[1]));
        ++row;
    }
    if (values.empty()) throw std::runtime_error("series csv: no data rows");
    if (interval == 0) interval = 1;
    return UniformSeries(start, interval, std::move(values), unit);
}

std::string frame_to_csv(const FeatureFrame& frame) {
    std::string out = "timestamp,P_tot_kW,pct_rated,Ws_ms,Wa_sin,Wa_cos,Ot_C\n";
    for (std::size_t i = 0; i < frame.size(); ++i) {
        out += format_iso8601(frame.p_tot.timestamp_at(i));
        out += ',';
        append_opt(out, frame.p_tot[i]);
        out += ',';
        append_opt(out, frame.pct_rated[i]);
        out += ',';
        append_opt(out, frame.ws[i]);
        out += ',';
        append_opt(out, frame.wa_sin[i]);
        out += ',';
        append_opt(out, frame.wa_cos[i]);
        out += ',';
        append_opt(out, frame.ot[i]);
        out += '\n';
    }
    return out;
}

FeatureFrame frame_from_csv(const std::string& csv_text) {
    std::istringstream in(csv_text);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("frame csv: empty");
    std::vector<std::optional<double>> cols[6];
    Timestamp start = 0, prev = 0;
    Duration interval = 0;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv(line);
        if (cells.size() != 7) throw std::runtime_error("frame csv: expected 7 columns");
        const auto ts = parse_iso8601(cells[0]);
        if (!ts.has_value()) throw std::runtime_error("frame csv: bad timestamp '" + cells[0] + "'");
        if (row == 0) {
            start = *ts;
        } else if (row == 1) {
            interval = *ts - prev;
            if (interval <= 0) throw std::runtime_error("frame csv: non-increasing timestamps");
        } else if (*ts - prev != interval) {
            throw std::runtime_error("frame csv: irregular cadence at row " + std::to_string(row));
        }
        prev = *ts;
        for (int c = 0; c < 6; ++c) cols[c].push_back(parse_opt(cells[static_cast<std::size_t>(c) + 1]));
        ++row;
    }
    if (row == 0) throw std::runtime_error("frame csv: no data rows");
    if (interval == 0) interval = 1;
    FeatureFrame f;
    f.p_tot = UniformSeries(start, interval, std::move(cols[0]), "kW");
    f.pct_rated = UniformSeries(start, interval, std::move(cols[1]), "%");
    f.ws = UniformSeries(start, interval, std::move(cols[2]), "m/s");
    f.wa_sin = UniformSeries(start, interval, std::move(cols[3]), "");
    f.wa_cos = UniformSeries(start, interval, std::move(cols[4]), "");
    f.ot = UniformSeries(start, interval, std::move(cols[5]), "degC");
    return f;
}

std::string label_to_csv(const UniformSeries& power, const RampFunctionSeries& ramp,
                         const RampClassSeries& labels) {
    if (ramp.size() != power.size() || labels.size() != power.size())
        throw std::invalid_argument("label_to_csv: misaligned inputs");
    std::string out = "timestamp,power,ramp_function,ramp_class\n";
    for (std::size_t i = 0; i < power.size(); ++i) {
        out += format_iso8601(power.timestamp_at(i));
        out += ',';
        append_opt(out, power[i]);
        out += ',';
        append_opt(out, ramp.values[i]);
        out += ',';
        out += to_string(labels.labels[i]);
        out += '\n';
    }
    return out;
}

std::string events_to_json(const std::vector<RampEvent>& events, const EventExtraction* stats) {
    nlohmann::json j;
    j["events"] = nlohmann::json::array();
    for (const auto& ev : events) {
        j["events"].push_back({{"t0", format_iso8601(ev.t0)},
                               {"delta_p_kw", ev.delta_p},
                               {"delta_t_s", ev.delta_t},
                               {"rate_kw_per_min", ev.rate},
                               {"direction", ev.direction > 0 ? "+" : "-"}});
    }
    if (stats) {
        j["dropped_missing_power"] = stats->dropped_missing_power;
        j["dropped_sign_mismatch"] = stats->dropped_sign_mismatch;
    }
    return j.dump(2);
}

std::vector<RampEvent> events_from_json(const std::string& json_text) {
    const nlohmann::json j = nlohmann::json::parse(json_text);
    std::vector<RampEvent> out;
    for (const auto& e : j.at("events")) {
        RampEvent ev;
        const auto ts = parse_iso8601(e.at("t0").get<std::string>());
        if (!ts.has_value()) throw std::runtime_error("events json: bad t0");
        ev.t0 = *ts;
        ev.delta_p = e.at("delta_p_kw").get<double>();
        ev.delta_t = e.at("delta_t_s").get<Duration>();
        ev.rate = e.at("rate_kw_per_min").get<double>();
        ev.direction = e.at("direction").get<std::string>() == "+" ? +1 : -1;
        out.push_back(ev);
    }
    return out;
}

std::string detection_to_csv(const BinaryDetection& detection, const UniformSeries& series) {
    std::string out = "timestamp,flag,direction\n";
    for (std::size_t i = 0; i < detection.flags.size(); ++i) {
        out += format_iso8601(series.timestamp_at(detection.start_index + i));
        out += ',';
        out += to_string(detection.flags[i]);
        out += ',';
        const int dir = i < detection.directions.size() ? detection.directions[i] : 0;
        out += dir > 0 ? "+" : (dir < 0 ? "-" : "");
        out += '\n';
    }
    return out;
}

std::string detection_summary_json(const std::string& definition, const BinaryDetection& detection) {
    nlohmann::json j;
    j["definition"] = definition;
    j["positions"] = detection.flags.size();
    j["evaluable"] = detection.evaluable_count();
    j["ramp_steps"] = detection.ramp_count();
    j["ramp_frequency"] = detection.evaluable_count() == 0
                              ? 0.0
                              : static_cast<double>(detection.ramp_count()) /
                                    static_cast<double>(detection.evaluable_count());
    return j.dump(2);
}

} // namespace windramp
