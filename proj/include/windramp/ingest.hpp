#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "windramp/series.hpp"

namespace windramp {

/// Maps canonical feature names onto source CSV columns. timestamp and
/// P_avg are mandatory; the rest optional. Delimiter, decimal separator and
/// timestamp format are configurable because public SCADA exports vary.
struct ColumnMapping {
    std::string timestamp = "Date_time";
    std::string turbine_id = "Wind_turbine_name"; // empty: single implicit turbine
    std::string ws_avg = "Ws_avg";
    std::string wa_avg = "Wa_avg";
    std::string p_avg = "P_avg";
    std::string ot_avg = "Ot_avg";
    char delimiter = ',';
    char decimal_separator = '.';
    std::string timestamp_format = "%Y-%m-%d %H:%M:%S";
};

struct FarmConfig {
    double rated_power = 8200.0; // kW
    std::set<std::string> expected_turbines; // empty: discovered from data
    Duration cadence = 600;
    int gap_fill_limit = 3; // max consecutive missing slots to forward-fill
    enum class Aggregation { Strict, Available } aggregation = Aggregation::Strict;
};

/// One accepted SCADA row.
struct RawRecord {
    std::string turbine;
    Timestamp timestamp = 0;
    std::optional<double> ws;
    std::optional<double> wa;
    std::optional<double> p;
    std::optional<double> ot;
};

/// Aligned farm-level feature columns; all share start and interval.
struct FeatureFrame {
    UniformSeries p_tot;     // kW
    UniformSeries pct_rated; // %
    UniformSeries ws;        // m/s
    UniformSeries wa_sin;
    UniformSeries wa_cos;
    UniformSeries ot;        // degC

    std::size_t size() const { return p_tot.size(); }
};

struct IngestReport {
    std::size_t rows_read = 0;
    std::size_t rows_accepted = 0;
    std::size_t rows_rejected = 0;
    std::map<std::string, std::size_t> reject_reasons;
    std::map<std::string, double> turbine_coverage_pct; // present P slots / grid length
    std::size_t gaps_filled = 0;
    std::size_t gaps_left_missing = 0;
    std::size_t grid_conflicts = 0;
    std::size_t over_rated_warnings = 0; // pct_rated above 100 (reported, never clipped)
    Timestamp span_start = 0;
    Timestamp span_end = 0;

    std::string to_json() const;
};

/// Regularised per-turbine columns on a common grid.
struct TurbineSeries {
    std::string turbine;
    UniformSeries ws, wa, p, ot;
};

/// Parses a SCADA CSV extract. Unparseable rows are counted and skipped,
/// never abort the run; a duplicate (turbine, timestamp) keeps the first
/// occurrence. Missing mandatory header columns and data-less files are
/// hard errors.
std::vector<RawRecord> parse_scada(const std::string& path, const ColumnMapping& mapping,
                                   IngestReport& report);

/// In-memory variant used by tests and the single-file CLI path.
std::vector<RawRecord> parse_scada_text(const std::string& text, const ColumnMapping& mapping,
                                        IngestReport& report);

/// Snaps records to the cadence grid (nearest slot), builds per-turbine
/// columns over the common span, and forward-fills missing runs of at most
/// gap_fill_limit slots. Fill statistics and grid conflicts land in the
/// report.
std::vector<TurbineSeries> regularize(std::vector<RawRecord> records, const FarmConfig& config,
                                      IngestReport& report);

/// Farm aggregation: P_tot as the turbine sum, wind speed and temperature
/// as means, wind direction as the (sin, cos) of the circular mean, and
/// pct_rated = 100 * P_tot / rated_power. Under the strict policy a slot
/// with any expected turbine missing is missing.
FeatureFrame aggregate_farm(const std::vector<TurbineSeries>& turbines, const FarmConfig& config,
                            IngestReport& report);

} // namespace windramp
