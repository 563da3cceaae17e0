#include <cmath>

#include "helpers.hpp"
#include "hudtrack/analysis.hpp"
#include "hudtrack/synth.hpp"

using namespace hudtrack;
using namespace hudtrack::analysis;
using testing::error_code_of;

namespace {

FlightTrack grid_track(int n) {
  FlightTrack t;
  geodesy::GeoPoint p{47.07, 15.44};
  for (int i = 0; i < n; ++i) {
    TelemetryRecord r;
    r.t = i;
    r.frame_index = i;
    r.lat = p.lat;
    r.lon = p.lon;
    r.altitude = 1400.0 + i;
    t.records.push_back(r);
    p = geodesy::destination(p, 45.0, 67.0 / 3.6);
  }
  return t;
}

std::vector<TimedValue> series(std::initializer_list<double> v) {
  std::vector<TimedValue> out;
  double t = 0;
  for (double x : v) out.push_back({t++, x});
  return out;
}

}  // namespace

TEST_CASE("resample keeps multiples of the interval") {
  const auto t = grid_track(122);
  CHECK(resample(t, 1).size() == 122);
  CHECK(resample(t, 5).size() == 25);
  CHECK(resample(t, 10).size() == 13);
  CHECK(resample(t, 15).size() == 9);
  CHECK(resample(t, 20).size() == 7);
  CHECK(resample(resample(t, 5), 10).records == resample(t, 10).records);
  FlightTrack odd;
  odd.records = {t.records[3]};
  CHECK(error_code_of([&] { resample(odd, 5); }) == ErrorCode::EmptyTrack);
}

TEST_CASE("retention and reduction reproduce the reported counts") {
  CHECK(retention_stats(122, 82).retention_pct == 67.2);
  CHECK(retention_stats(122, 82).removal_pct == doctest::Approx(32.8));
  CHECK(retention_stats(25, 16).retention_pct == 64.0);
  CHECK(retention_stats(13, 10).retention_pct == 76.9);
  CHECK(retention_stats(9, 5).retention_pct == 55.6);
  CHECK(retention_stats(7, 6).retention_pct == 85.7);
  CHECK(retention_stats(7, 7).retention_pct == 100.0);
  CHECK(error_code_of([] { retention_stats(0, 0); }) == ErrorCode::EmptyInput);
  CHECK(reduction_vs_baseline(16, 82) == 80.5);
  CHECK(reduction_vs_baseline(82, 82) == 0.0);
  CHECK(reduction_vs_baseline(0, 82) == 100.0);
}

TEST_CASE("rmse on aligned timestamps") {
  const auto a = series({1, 2, 3});
  CHECK(rmse(a, a).rmse == 0.0);
  const auto r = rmse(a, series({2, 2, 5}));
  CHECK(r.rmse == doctest::Approx(1.2909944487358056).epsilon(1e-14));
  CHECK(r.aligned == 3);
  const auto shifted = rmse(a, series({4, 5, 6}));
  CHECK(shifted.rmse == doctest::Approx(3.0));
  CHECK(shifted.sigma == doctest::Approx(0.0));
  CHECK(rmse(series({4, 5, 6}), a).rmse == shifted.rmse);
  // only t = 2 is shared
  const std::vector<TimedValue> sparse = {{2, 10}, {7, 1}};
  const auto one = rmse(a, sparse);
  CHECK(one.aligned == 1);
  CHECK(one.rmse == doctest::Approx(7.0));
  const std::vector<TimedValue> disjoint = {{10, 1}};
  CHECK(error_code_of([&] { rmse(a, disjoint); }) == ErrorCode::NoAlignment);
}

TEST_CASE("speed statistics") {
  const std::vector<double> flat = {72, 72, 72};
  auto s = speed_stats(flat);
  CHECK(s.mean == 72.0);
  CHECK(s.max == 72.0);
  CHECK(s.sigma == 0.0);
  const std::vector<double> two = {60, 80};
  s = speed_stats(two);
  CHECK(s.mean == 70.0);
  CHECK(s.max == 80.0);
  CHECK(s.sigma == doctest::Approx(10.0));
  REQUIRE(s.histogram.counts.size() == 17);
  CHECK(s.histogram.counts[12] == 1);
  CHECK(s.histogram.counts[16] == 1);
  const std::vector<double> single = {33.3};
  CHECK(speed_stats(single).sigma == 0.0);
  CHECK(error_code_of([] { speed_stats(std::vector<double>{}); }) == ErrorCode::EmptyInput);
}

TEST_CASE("altitude statistics") {
  FlightTrack t = grid_track(3);
  t.records[0].altitude = 1000.0;
  t.records[1].altitude = 1500.0;
  t.records[2].altitude.reset();
  const auto a = altitude_stats(t);
  CHECK(a.peak == 1500.0);
  CHECK(a.mean == 1250.0);
  CHECK(a.sigma_over_mean_pct == doctest::Approx(20.0));
  CHECK(a.samples == 2);
  CHECK(a.missing == 1);
  for (auto& r : t.records) r.altitude = 1500.0;
  CHECK(altitude_stats(t).sigma_over_mean_pct == 0.0);
  for (auto& r : t.records) r.altitude.reset();
  CHECK(error_code_of([&] { altitude_stats(t); }) == ErrorCode::NoAltitudeData);
}

TEST_CASE("point spacing") {
  const auto t = grid_track(121);
  CHECK(point_spacing_stats(t, geodesy::Haversine{}) == doctest::Approx(67.0 / 3.6).epsilon(1e-9));
  CHECK(point_spacing_stats(t, geodesy::Haversine{}) == doctest::Approx(18.6).epsilon(0.001));
  FlightTrack one;
  one.records = {t.records[0]};
  CHECK(error_code_of([&] { point_spacing_stats(one, geodesy::Haversine{}); }) == ErrorCode::TooShort);
}

TEST_CASE("method comparison matrix is symmetric with a zero diagonal") {
  synth::FlightSimParams p;
  const auto truth = synth::simulate_flight(p);
  const int intervals[] = {1, 5, 10, 15, 20};
  const auto reports = compare_methods(truth, intervals, {}, trajectory::FilterParams{});
  REQUIRE(reports.size() == 5);
  for (const auto& r : reports) {
    REQUIRE(r.rmse.size() == 3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) CHECK(r.rmse[i][j] == r.rmse[j][i]);
    for (std::size_t i = 0; i < 3; ++i) CHECK(r.rmse[i][i] == 0.0);
    CHECK(r.distance_pct_vs_utm[0] == 0.0);
    // UTM vs haversine mean speeds well under 0.05 km/h
    CHECK(std::abs(r.methods[0].mean_speed_kmh - r.methods[1].mean_speed_kmh) < 0.05);
  }
  CHECK(reports[0].points == 122);
  CHECK(reports[4].points == 7);
}

TEST_CASE("raw bias on an east-west leg at 47N") {
  FlightTrack t;
  geodesy::GeoPoint p{47.0, 15.0};
  for (int i = 0; i < 61; ++i) {
    TelemetryRecord r;
    r.t = i;
    r.frame_index = i;
    r.lat = 47.0;
    r.lon = 15.0 + 0.0002 * i;
    t.records.push_back(r);
  }
  const auto m = summarize_methods(t, 1, {});
  const double raw_vs_hav = m.methods[2].distance_km / m.methods[1].distance_km - 1.0;
  // K over the haversine degree times the 1/cos(lat) stretch
  const double expected = (111320.0 / 111195.08023353292) * (1.0 + 0.4662791856396249) - 1.0;
  CHECK(raw_vs_hav == doctest::Approx(expected).epsilon(1e-5));
  CHECK(m.distance_pct_vs_utm[2] > 40.0);
}

TEST_CASE("sampling report uses the smallest interval as baseline") {
  synth::FlightSimParams p;
  const auto truth = synth::simulate_flight(p);
  std::vector<IntervalTracks> tracks;
  for (int i : {20, 1, 5}) tracks.push_back({i, resample(truth, i), resample(truth, i)});
  const auto rep = build_sampling_report(tracks, {});
  CHECK(rep.baseline_interval == 1);
  REQUIRE(rep.intervals.size() == 3);
  CHECK(rep.intervals[0].interval_s == 1);
  CHECK(rep.intervals[0].rmse_vs_baseline->rmse == 0.0);
  CHECK(rep.intervals[1].interval_s == 5);
  CHECK(rep.intervals[1].raw_count == 25);
  CHECK(rep.intervals[1].retention.retention_pct == 100.0);
  CHECK(rep.intervals[1].reduction_vs_baseline_pct == doctest::Approx(79.5));
  CHECK(rep.intervals[2].speeds.size() == 3);
  CHECK(rep.intervals[2].altitude->samples == 7);
  CHECK(error_code_of([] { build_sampling_report(std::vector<IntervalTracks>{}, {}); }) == ErrorCode::EmptyInput);
}

TEST_CASE("round_to rounds half away from zero") {
  CHECK(round_to(67.25, 1) == 67.3);
  CHECK(round_to(-0.05, 1) == -0.1);
  CHECK(round_to(1.0 / 3.0, 2) == 0.33);
}
