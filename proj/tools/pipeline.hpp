#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "windramp/ingest.hpp"
#include "windramp/metrics.hpp"
#include "windramp/synth.hpp"

namespace windramp::cli {

/// Synthetic or ingested farm data ready for modelling.
struct DataBundle {
    FeatureFrame frame;
    std::vector<RampEvent> truth_events; // synth ground truth, empty for csv
    IngestReport ingest_report;          // csv source only
    bool from_csv = false;
};

/// Fills in the seeded auto-placed event list when synth.events = auto.
void resolve_synth_events(RunConfig& cfg);

/// Builds the feature frame from the configured source (synthetic series
/// get deterministic auxiliary weather columns derived per seed) and
/// resamples to hourly when configured.
DataBundle acquire_data(const RunConfig& cfg);

/// One evaluated model run plus its plot rows.
struct RunResult {
    EvalReport report;
    std::string plot_csv;
};

/// Fits and scores every configured model; reports carry the config
/// fingerprint.
std::vector<RunResult> run_evaluation(const RunConfig& cfg, const DataBundle& data);

} // namespace windramp::cli
