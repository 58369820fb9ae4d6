#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "windramp/ingest.hpp"
#include "windramp/io.hpp"
#include "windramp/rng.hpp"

using namespace windramp;

namespace {

const char* kHeader = "Date_time,Wind_turbine_name,Ws_avg,Wa_avg,P_avg,Ot_avg\n";

std::string sample_file() {
    std::string f = kHeader;
    f += "2013-01-07 00:20:00,R80711,7.2,233.0,512.5,11.3\n";
    f += "2013-01-07 00:20:00,R80712,6.9,230.0,487.0,11.1\n";
    f += "2013-01-07 00:30:00,R80711,7.4,235.0,530.0,11.2\n";
    f += "2013-01-07 00:30:00,R80712,7.0,232.0,505.0,11.0\n";
    return f;
}

} // namespace

TEST_CASE("parse_scada accepts well-formed rows with all features") {
    IngestReport report;
    const auto records = parse_scada_text(sample_file(), ColumnMapping{}, report);
    REQUIRE(records.size() == 4);
    CHECK(report.rows_read == 4);
    CHECK(report.rows_accepted == 4);
    CHECK(report.rows_rejected == 0);
    const RawRecord& r = records[0];
    CHECK(r.turbine == "R80711");
    CHECK(r.ws.value() == doctest::Approx(7.2));
    CHECK(r.wa.value() == doctest::Approx(233.0));
    CHECK(r.p.value() == doctest::Approx(512.5));
    CHECK(r.ot.value() == doctest::Approx(11.3));
    CHECK(format_iso8601(r.timestamp) == "2013-01-07T00:20:00Z");
}

TEST_CASE("parse_scada: malformed rows are rejected with reasons, run continues") {
    std::string f = kHeader;
    f += "not-a-date,R80711,7.2,233.0,512.5,11.3\n";          // bad timestamp
    f += "2013-01-07 00:20:00,R80711,7.2,233.0,oops,11.3\n";  // bad numeric power
    f += "2013-01-07 00:30:00,R80711,7.2,233.0\n";            // wrong field count
    f += "2013-01-07 00:40:00,R80711,7.2,233.0,512.5,11.3\n"; // good
    f += "2013-01-07 00:40:00,R80711,9.9,111.0,100.0,9.9\n";  // duplicate key
    IngestReport report;
    const auto records = parse_scada_text(f, ColumnMapping{}, report);
    CHECK(records.size() == 1);
    CHECK(report.rows_read == 5);
    CHECK(report.rows_accepted == 1);
    CHECK(report.rows_rejected == 4);
    CHECK(report.reject_reasons.at("bad timestamp") == 1);
    CHECK(report.reject_reasons.at("bad value: P_avg") == 1);
    CHECK(report.reject_reasons.at("wrong field count") == 1);
    CHECK(report.reject_reasons.at("duplicate (turbine, timestamp)") == 1);
    // Bookkeeping is exact.
    CHECK(report.rows_accepted + report.rows_rejected == report.rows_read);
}

TEST_CASE("parse_scada: empty cells are missing features, not rejections") {
    std::string f = kHeader;
    f += "2013-01-07 00:20:00,R80711,,233.0,512.5,\n";
    IngestReport report;
    const auto records = parse_scada_text(f, ColumnMapping{}, report);
    REQUIRE(records.size() == 1);
    CHECK_FALSE(records[0].ws.has_value());
    CHECK_FALSE(records[0].ot.has_value());
    CHECK(records[0].p.has_value());
}

TEST_CASE("parse_scada hard errors: empty file, missing mandatory column, no data rows") {
    IngestReport r1;
    CHECK_THROWS_WITH_AS(parse_scada_text("", ColumnMapping{}, r1),
                         doctest::Contains("empty file"), std::runtime_error);
    IngestReport r2;
    CHECK_THROWS_WITH_AS(parse_scada_text("a,b,c\n", ColumnMapping{}, r2),
                         doctest::Contains("timestamp column"), std::runtime_error);
    IngestReport r3;
    CHECK_THROWS_WITH_AS(parse_scada_text(kHeader, ColumnMapping{}, r3),
                         doctest::Contains("no data rows"), std::runtime_error);
}

TEST_CASE("parse_scada honours custom delimiter, decimal separator and format") {
    ColumnMapping m;
    m.delimiter = ';';
    m.decimal_separator = ',';
    m.timestamp_format = "%d/%m/%Y %H:%M";
    std::string f = "Date_time;Wind_turbine_name;Ws_avg;Wa_avg;P_avg;Ot_avg\n";
    f += "07/01/2013 00:20;T1;7,2;233,0;512,5;11,3\n";
    IngestReport report;
    const auto records = parse_scada_text(f, m, report);
    REQUIRE(records.size() == 1);
    CHECK(records[0].p.value() == doctest::Approx(512.5));
    CHECK(format_iso8601(records[0].timestamp) == "2013-01-07T00:20:00Z");
}

TEST_CASE("regularize: snapping, gap filling within the limit") {
    IngestReport report;
    std::vector<RawRecord> records;
    auto rec = [](Timestamp ts, double p) {
        RawRecord r;
        r.turbine = "T1";
        r.timestamp = ts;
        r.p = p;
        return r;
    };
    // 10-min grid with a 2-slot hole at 1200/1800 and a 7-slot hole later.
    records.push_back(rec(0, 100));
    records.push_back(rec(601, 110)); // snaps to 600
    records.push_back(rec(2400, 120));
    for (int k = 0; k < 3; ++k)
        records.push_back(rec(3000 + 600 * k, 130.0 + k));
    records.push_back(rec(4800 + 7 * 600, 140)); // leaves slots 4800..8400-600 missing

    FarmConfig cfg;
    cfg.cadence = 600;
    cfg.gap_fill_limit = 3;
    const auto turbines = regularize(records, cfg, report);
    REQUIRE(turbines.size() == 1);
    const auto& p = turbines[0].p;
    CHECK(p[2].value() == 110.0); // filled from slot 1
    CHECK(p[3].value() == 110.0);
    CHECK(report.gaps_filled == 2);       // the two-slot hole, power column only
    CHECK(report.gaps_left_missing == 7); // the long run stays missing
    for (std::size_t i = 8; i < 15; ++i) CHECK_FALSE(p[i].has_value());
    CHECK(p[15].value() == 140.0);
}

TEST_CASE("regularize: gap_fill_limit 0 keeps exactly the present points") {
    IngestReport report;
    std::vector<RawRecord> records;
    for (Timestamp ts : {0, 600, 2400}) {
        RawRecord r;
        r.turbine = "T1";
        r.timestamp = ts;
        r.p = 1.0;
        records.push_back(r);
    }
    FarmConfig cfg;
    cfg.gap_fill_limit = 0;
    const auto turbines = regularize(records, cfg, report);
    const auto& p = turbines[0].p;
    CHECK(p.present_count() == 3);
    CHECK(report.gaps_filled == 0);
}

TEST_CASE("regularize: conflicting records on one slot keep the first and report") {
    IngestReport report;
    RawRecord a, b;
    a.turbine = b.turbine = "T1";
    a.timestamp = 0;
    b.timestamp = 100; // snaps onto slot 0 too
    a.p = 5.0;
    b.p = 9.0;
    const auto turbines = regularize({a, b}, FarmConfig{}, report);
    CHECK(turbines[0].p[0].value() == 5.0);
    CHECK(report.grid_conflicts == 1);
}

TEST_CASE("aggregate_farm: P_tot sum and pct_rated formula") {
    IngestReport report;
    std::vector<TurbineSeries> turbines;
    const std::vector<double> powers{1000, 1200, 900, 1000};
    for (std::size_t k = 0; k < powers.size(); ++k) {
        TurbineSeries t;
        t.turbine = "T" + std::to_string(k);
        t.ws = UniformSeries::dense(0, 600, {8.0});
        t.wa = UniformSeries::dense(0, 600, {200.0});
        t.p = UniformSeries::dense(0, 600, {powers[k]});
        t.ot = UniformSeries::dense(0, 600, {10.0});
        turbines.push_back(t);
    }
    const FeatureFrame f = aggregate_farm(turbines, FarmConfig{}, report);
    CHECK(f.p_tot[0].value() == doctest::Approx(4100.0));
    CHECK(f.pct_rated[0].value() == doctest::Approx(50.0)); // 4100 / 8200 * 100
    CHECK(f.ws[0].value() == doctest::Approx(8.0));
    CHECK(f.ot[0].value() == doctest::Approx(10.0));
}

TEST_CASE("aggregate_farm: circular mean across north") {
    IngestReport report;
    std::vector<TurbineSeries> turbines;
    for (double deg : {350.0, 10.0}) {
        TurbineSeries t;
        t.turbine = "T" + std::to_string(static_cast<int>(deg));
        t.ws = UniformSeries::dense(0, 600, {8.0});
        t.wa = UniformSeries::dense(0, 600, {deg});
        t.p = UniformSeries::dense(0, 600, {100.0});
        t.ot = UniformSeries::dense(0, 600, {10.0});
        turbines.push_back(t);
    }
    const FeatureFrame f = aggregate_farm(turbines, FarmConfig{}, report);
    // Circular mean of 350 and 10 degrees is north: (sin, cos) = (0, 1).
    CHECK(std::fabs(f.wa_sin[0].value()) < 1e-12);
    CHECK(f.wa_cos[0].value() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("aggregate_farm: strict vs available policy on a missing turbine") {
    IngestReport report;
    std::vector<TurbineSeries> turbines;
    for (int k = 0; k < 2; ++k) {
        TurbineSeries t;
        t.turbine = "T" + std::to_string(k);
        if (k == 0)
            t.p = UniformSeries(0, 600, {std::optional<double>{}, 500.0});
        else
            t.p = UniformSeries::dense(0, 600, {400.0, 450.0});
        t.ws = UniformSeries(0, 600, {std::optional<double>{}, 7.0});
        t.wa = UniformSeries(0, 600, {std::optional<double>{}, 180.0});
        t.ot = UniformSeries(0, 600, {std::optional<double>{}, 9.0});
        turbines.push_back(t);
    }
    FarmConfig strict;
    const FeatureFrame fs = aggregate_farm(turbines, strict, report);
    CHECK_FALSE(fs.p_tot[0].has_value());
    CHECK(fs.p_tot[1].value() == doctest::Approx(950.0));

    FarmConfig avail;
    avail.aggregation = FarmConfig::Aggregation::Available;
    const FeatureFrame fa = aggregate_farm(turbines, avail, report);
    CHECK(fa.p_tot[0].value() == doctest::Approx(400.0));

    CHECK_THROWS_AS(aggregate_farm({}, FarmConfig{}, report), std::runtime_error);
}

TEST_CASE("available-policy monotonicity: adding a turbine never lowers P_tot") {
    IngestReport report;
    Rng rng(55);
    std::vector<TurbineSeries> turbines;
    for (int k = 0; k < 3; ++k) {
        TurbineSeries t;
        t.turbine = "T" + std::to_string(k);
        std::vector<std::optional<double>> p;
        for (int i = 0; i < 20; ++i) {
            if (rng.uniform01() < 0.2)
                p.push_back(std::nullopt);
            else
                p.push_back(rng.uniform(0.0, 2000.0));
        }
        t.p = UniformSeries(0, 600, p);
        t.ws = t.p;
        t.wa = t.p;
        t.ot = t.p;
        turbines.push_back(t);
    }
    FarmConfig avail;
    avail.aggregation = FarmConfig::Aggregation::Available;
    std::vector<TurbineSeries> two(turbines.begin(), turbines.begin() + 2);
    const FeatureFrame f2 = aggregate_farm(two, avail, report);
    const FeatureFrame f3 = aggregate_farm(turbines, avail, report);
    for (std::size_t i = 0; i < f2.size(); ++i) {
        if (!f2.p_tot[i].has_value()) continue;
        REQUIRE(f3.p_tot[i].has_value());
        CHECK(f3.p_tot[i].value() >= f2.p_tot[i].value() - 1e-12);
    }
}

TEST_CASE("over-rated slots are warned about, never clipped") {
    IngestReport report;
    TurbineSeries t;
    t.turbine = "T0";
    t.p = UniformSeries::dense(0, 600, {9000.0});
    t.ws = UniformSeries::dense(0, 600, {25.0});
    t.wa = UniformSeries::dense(0, 600, {90.0});
    t.ot = UniformSeries::dense(0, 600, {5.0});
    const FeatureFrame f = aggregate_farm({t}, FarmConfig{}, report);
    CHECK(f.pct_rated[0].value() > 100.0);
    CHECK(report.over_rated_warnings == 1);
}

TEST_CASE("ingest pipeline is deterministic: bit-identical frame and report") {
    auto run = [](std::string* frame_csv, std::string* report_json) {
        IngestReport report;
        const auto records = parse_scada_text(sample_file(), ColumnMapping{}, report);
        FarmConfig cfg;
        const auto turbines = regularize(records, cfg, report);
        const FeatureFrame frame = aggregate_farm(turbines, cfg, report);
        *frame_csv = frame_to_csv(frame);
        *report_json = report.to_json();
    };
    std::string f1, r1, f2, r2;
    run(&f1, &r1);
    run(&f2, &r2);
    CHECK(f1 == f2);
    CHECK(r1 == r2);
    // Frame CSV round-trips.
    const FeatureFrame back = frame_from_csv(f1);
    CHECK(frame_to_csv(back) == f1);
}
