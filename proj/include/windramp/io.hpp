#pragma once

#include <string>
#include <vector>

#include "windramp/detectors.hpp"
#include "windramp/ingest.hpp"
#include "windramp/series.hpp"
#include "windramp/wavelet.hpp"

namespace windramp {

/// Shortest round-trip decimal rendering of a double.
std::string format_double(double v);

/// Writes content atomically (temp file + rename) so failed runs leave no
/// partial artifact in the declared output slot.
void write_file_atomic(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

/// timestamp,value rows with an ISO-8601 UTC timestamp column; missing
/// values are empty cells.
std::string series_to_csv(const UniformSeries& series, const std::string& value_header = "value");
UniformSeries series_from_csv(const std::string& csv_text, const std::string& unit = "");

/// One row per grid slot: timestamp,P_tot_kW,pct_rated,Ws_ms,Wa_sin,Wa_cos,Ot_C.
std::string frame_to_csv(const FeatureFrame& frame);
FeatureFrame frame_from_csv(const std::string& csv_text);

/// timestamp,power,ramp_function,ramp_class rows for ramp-overlay plots.
std::string label_to_csv(const UniformSeries& power, const RampFunctionSeries& ramp,
                         const RampClassSeries& labels);

/// Detected events as a JSON list.
std::string events_to_json(const std::vector<RampEvent>& events, const EventExtraction* stats = nullptr);
std::vector<RampEvent> events_from_json(const std::string& json_text);

/// timestamp,flag,direction rows over the evaluable range.
std::string detection_to_csv(const BinaryDetection& detection, const UniformSeries& series);

/// Summary counts for one detector run.
std::string detection_summary_json(const std::string& definition, const BinaryDetection& detection);

} // namespace windramp
