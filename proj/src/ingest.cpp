#include "windramp/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace windramp {

std::string IngestReport::to_json() const {
    nlohmann::json j;
    j["rows_read"] = rows_read;
    j["rows_accepted"] = rows_accepted;
    j["rows_rejected"] = rows_rejected;
    j["reject_reasons"] = reject_reasons;
    j["turbine_coverage_pct"] = turbine_coverage_pct;
    j["gaps_filled"] = gaps_filled;
    j["gaps_left_missing"] = gaps_left_missing;
    j["grid_conflicts"] = grid_conflicts;
    j["over_rated_warnings"] = over_rated_warnings;
    j["span_start"] = format_iso8601(span_start);
    j["span_end"] = format_iso8601(span_end);
    return j.dump(2);
}

namespace {

std::vector<std::string> split_line(const std::string& line, char delimiter) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == delimiter) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
    while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
    return s.substr(a, b - a);
}

bool is_missing_token(const std::string& s) {
    if (s.empty()) return true;
    std::string lower;
    for (char c : s) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return lower == "na" || lower == "nan" || lower == "null";
}

// Parses a numeric cell; empty/NA tokens are missing, anything else that
// fails to parse fully is an error (distinguished by the bool).
enum class CellParse { Value, Missing, Bad };

CellParse parse_cell(const std::string& raw, char decimal_separator, double& out) {
    const std::string s = trim(raw);
    if (is_missing_token(s)) return CellParse::Missing;
    std::string norm = s;
    if (decimal_separator != '.')
        std::replace(norm.begin(), norm.end(), decimal_separator, '.');
    const char* begin = norm.c_str();
    const char* end = begin + norm.size();
    const auto res = std::from_chars(begin, end, out);
    if (res.ec != std::errc() || res.ptr != end) return CellParse::Bad;
    return CellParse::Value;
}

} // namespace

std::vector<RawRecord> parse_scada_text(const std::string& text, const ColumnMapping& mapping,
                                        IngestReport& report) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("parse_scada: empty file");

    const std::vector<std::string> header = split_line(trim(line), mapping.delimiter);
    auto column_of = [&](const std::string& name) -> std::optional<std::size_t> {
        if (name.empty()) return std::nullopt;
        for (std::size_t i = 0; i < header.size(); ++i)
            if (trim(header[i]) == name) return i;
        return std::nullopt;
    };

    const auto ts_col = column_of(mapping.timestamp);
    const auto p_col = column_of(mapping.p_avg);
    if (!ts_col.has_value())
        throw std::runtime_error("parse_scada: mandatory timestamp column '" + mapping.timestamp +
                                 "' not in header");
    if (!p_col.has_value())
        throw std::runtime_error("parse_scada: mandatory power column '" + mapping.p_avg +
                                 "' not in header");
    const auto turbine_col = column_of(mapping.turbine_id);
    const auto ws_col = column_of(mapping.ws_avg);
    const auto wa_col = column_of(mapping.wa_avg);
    const auto ot_col = column_of(mapping.ot_avg);

    std::vector<RawRecord> records;
    std::set<std::pair<std::string, Timestamp>> seen;
    auto reject = [&](const std::string& reason) {
        ++report.rows_rejected;
        ++report.reject_reasons[reason];
    };

    while (std::getline(in, line)) {
        ++report.rows_read;
        const std::string stripped = trim(line);
        if (stripped.empty()) {
            reject("blank line");
            continue;
        }
        const std::vector<std::string> cells = split_line(stripped, mapping.delimiter);
        if (cells.size() != header.size()) {
            reject("wrong field count");
            continue;
        }
        const auto ts = parse_timestamp(trim(cells[*ts_col]), mapping.timestamp_format);
        if (!ts.has_value()) {
            reject("bad timestamp");
            continue;
        }
        RawRecord rec;
        rec.timestamp = *ts;
        rec.turbine = turbine_col.has_value() ? trim(cells[*turbine_col]) : std::string("turbine-0");
        if (rec.turbine.empty()) rec.turbine = "turbine-0";

        bool bad = false;
        auto read_feature = [&](const std::optional<std::size_t>& col, const char* name,
                                std::optional<double>& slot) {
            if (bad || !col.has_value()) return;
            double v = 0.0;
            switch (parse_cell(cells[*col], mapping.decimal_separator, v)) {
                case CellParse::Value: slot = v; break;
                case CellParse::Missing: break;
                case CellParse::Bad:
                    reject(std::string("bad value: ") + name);
                    bad = true;
                    break;
            }
        };
        read_feature(p_col, "P_avg", rec.p);
        read_feature(ws_col, "Ws_avg", rec.ws);
        read_feature(wa_col, "Wa_avg", rec.wa);
        read_feature(ot_col, "Ot_avg", rec.ot);
        if (bad) continue;

        if (!seen.insert({rec.turbine, rec.timestamp}).second) {
            reject("duplicate (turbine, timestamp)");
            continue;
        }
        records.push_back(std::move(rec));
        ++report.rows_accepted;
    }

    if (report.rows_read == 0) throw std::runtime_error("parse_scada: no data rows");
    return records;
}

std::vector<RawRecord> parse_scada(const std::string& path, const ColumnMapping& mapping,
                                   IngestReport& report) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("parse_scada: cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scada_text(buf.str(), mapping, report);
}

namespace {

std::int64_t snap_slot(Timestamp t, Duration cadence) {
    // Nearest grid slot; ties round up.
    const std::int64_t num = t + cadence / 2;
    std::int64_t q = num / cadence;
    if (num % cadence != 0 && num < 0) --q;
    return q;
}

struct SlotValues {
    std::optional<double> ws, wa, p, ot;
};

void forward_fill(std::vector<std::optional<double>>& v, int limit, std::size_t& filled,
                  std::size_t& left) {
    std::size_t i = 0;
    // Leading missing slots are never filled.
    while (i < v.size() && !v[i].has_value()) ++i;
    while (i < v.size()) {
        if (v[i].has_value()) {
            ++i;
            continue;
        }
        std::size_t run_end = i;
        while (run_end < v.size() && !v[run_end].has_value()) ++run_end;
        const std::size_t run = run_end - i;
        if (run <= static_cast<std::size_t>(limit)) {
            const std::optional<double> prior = v[i - 1];
            for (std::size_t k = i; k < run_end; ++k) v[k] = prior;
            filled += run;
        } else {
            left += run;
        }
        i = run_end;
    }
}

} // namespace

std::vector<TurbineSeries> regularize(std::vector<RawRecord> records, const FarmConfig& config,
                                      IngestReport& report) {
    if (records.empty()) throw std::runtime_error("regularize: no records");
    if (config.cadence <= 0) throw std::runtime_error("regularize: cadence must be > 0");
    if (config.gap_fill_limit < 0) throw std::runtime_error("regularize: gap_fill_limit must be >= 0");

    std::stable_sort(records.begin(), records.end(),
                     [](const RawRecord& a, const RawRecord& b) { return a.timestamp < b.timestamp; });

    std::int64_t slot_min = 0, slot_max = 0;
    bool first = true;
    std::map<std::string, std::map<std::int64_t, SlotValues>> grids;
    for (const auto& rec : records) {
        const std::int64_t slot = snap_slot(rec.timestamp, config.cadence);
        if (first) {
            slot_min = slot_max = slot;
            first = false;
        } else {
            slot_min = std::min(slot_min, slot);
            slot_max = std::max(slot_max, slot);
        }
        auto& grid = grids[rec.turbine];
        auto [it, inserted] = grid.try_emplace(slot, SlotValues{rec.ws, rec.wa, rec.p, rec.ot});
        if (!inserted) {
            // Distinct records snapped onto one slot: keep the first, report
            // a conflict when the values actually differ.
            const SlotValues& kept = it->second;
            if (kept.p != rec.p || kept.ws != rec.ws || kept.wa != rec.wa || kept.ot != rec.ot)
                ++report.grid_conflicts;
        }
    }

    report.span_start = slot_min * config.cadence;
    report.span_end = slot_max * config.cadence;
    const std::size_t n = static_cast<std::size_t>(slot_max - slot_min + 1);

    std::vector<TurbineSeries> out;
    for (auto& [turbine, grid] : grids) {
        std::vector<std::optional<double>> ws(n), wa(n), p(n), ot(n);
        for (const auto& [slot, vals] : grid) {
            const std::size_t i = static_cast<std::size_t>(slot - slot_min);
            ws[i] = vals.ws;
            wa[i] = vals.wa;
            p[i] = vals.p;
            ot[i] = vals.ot;
        }
        std::size_t present = 0;
        for (const auto& v : p)
            if (v.has_value()) ++present;
        report.turbine_coverage_pct[turbine] =
            100.0 * static_cast<double>(present) / static_cast<double>(n);

        forward_fill(ws, config.gap_fill_limit, report.gaps_filled, report.gaps_left_missing);
        forward_fill(wa, config.gap_fill_limit, report.gaps_filled, report.gaps_left_missing);
        forward_fill(p, config.gap_fill_limit, report.gaps_filled, report.gaps_left_missing);
        forward_fill(ot, config.gap_fill_limit, report.gaps_filled, report.gaps_left_missing);

        const Timestamp start = slot_min * config.cadence;
        TurbineSeries ts;
        ts.turbine = turbine;
        ts.ws = UniformSeries(start, config.cadence, std::move(ws), "m/s");
        ts.wa = UniformSeries(start, config.cadence, std::move(wa), "deg");
        ts.p = UniformSeries(start, config.cadence, std::move(p), "kW");
        ts.ot = UniformSeries(start, config.cadence, std::move(ot), "degC");
        out.push_back(std::move(ts));
    }
    return out;
}

FeatureFrame aggregate_farm(const std::vector<TurbineSeries>& turbines, const FarmConfig& config,
                            IngestReport& report) {
    if (turbines.empty()) throw std::runtime_error("aggregate_farm: zero turbines");
    if (!(config.rated_power > 0.0))
        throw std::runtime_error("aggregate_farm: rated power must be > 0");
    const std::size_t n = turbines.front().p.size();
    const Timestamp start = turbines.front().p.start();
    const Duration interval = turbines.front().p.interval();
    for (const auto& t : turbines)
        if (t.p.size() != n || t.p.start() != start || t.p.interval() != interval)
            throw std::runtime_error("aggregate_farm: turbines not on the same grid");

    std::set<std::string> expected = config.expected_turbines;
    if (expected.empty())
        for (const auto& t : turbines) expected.insert(t.turbine);
    const bool strict = config.aggregation == FarmConfig::Aggregation::Strict;

    std::vector<std::optional<double>> p_tot(n), pct(n), ws(n), wa_sin(n), wa_cos(n), ot(n);
    for (std::size_t i = 0; i < n; ++i) {
        double p_sum = 0.0, ws_sum = 0.0, ot_sum = 0.0, sin_sum = 0.0, cos_sum = 0.0;
        std::size_t p_n = 0, ws_n = 0, ot_n = 0, wa_n = 0;
        bool p_all = true, ws_all = true, ot_all = true, wa_all = true;
        for (const auto& t : turbines) {
            if (!expected.count(t.turbine)) continue;
            if (t.p[i].has_value()) {
                p_sum += *t.p[i];
                ++p_n;
            } else {
                p_all = false;
            }
            if (t.ws[i].has_value()) {
                ws_sum += *t.ws[i];
                ++ws_n;
            } else {
                ws_all = false;
            }
            if (t.ot[i].has_value()) {
                ot_sum += *t.ot[i];
                ++ot_n;
            } else {
                ot_all = false;
            }
            if (t.wa[i].has_value()) {
                const double rad = *t.wa[i] * 3.14159265358979323846 / 180.0;
                sin_sum += std::sin(rad);
                cos_sum += std::cos(rad);
                ++wa_n;
            } else {
                wa_all = false;
            }
        }
        if (p_n > 0 && (!strict || p_all)) {
            p_tot[i] = p_sum;
            pct[i] = 100.0 * p_sum / config.rated_power;
            if (*pct[i] > 100.0 + 1e-9) ++report.over_rated_warnings;
        }
        if (ws_n > 0 && (!strict || ws_all)) ws[i] = ws_sum / static_cast<double>(ws_n);
        if (ot_n > 0 && (!strict || ot_all)) ot[i] = ot_sum / static_cast<double>(ot_n);
        if (wa_n > 0 && (!strict || wa_all)) {
            const double norm = std::hypot(sin_sum, cos_sum);
            if (norm > 1e-12) { // opposite directions cancel: undefined mean
                const double mean_angle = std::atan2(sin_sum, cos_sum);
                wa_sin[i] = std::sin(mean_angle);
                wa_cos[i] = std::cos(mean_angle);
            }
        }
    }

    FeatureFrame frame;
    frame.p_tot = UniformSeries(start, interval, std::move(p_tot), "kW");
    frame.pct_rated = UniformSeries(start, interval, std::move(pct), "%");
    frame.ws = UniformSeries(start, interval, std::move(ws), "m/s");
    frame.wa_sin = UniformSeries(start, interval, std::move(wa_sin), "");
    frame.wa_cos = UniformSeries(start, interval, std::move(wa_cos), "");
    frame.ot = UniformSeries(start, interval, std::move(ot), "degC");
    return frame;
}

} // namespace windramp
