#include "hudtrack/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "hudtrack/error.hpp"

namespace hudtrack::analysis {

double round_to(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(value * scale) / scale;
}

FlightTrack resample(const FlightTrack& track, int interval_s) {
  if (interval_s < 1) throw Error(ErrorCode::InvalidInterval, "interval must be >= 1 s");
  FlightTrack out;
  out.crs = track.crs;
  for (const auto& r : track.records) {
    const double k = r.t / interval_s;
    if (std::abs(k - std::round(k)) < 1e-9) out.records.push_back(r);
  }
  if (out.empty()) throw Error(ErrorCode::EmptyTrack, "no record at a multiple of " + std::to_string(interval_s) + " s");
  return out;
}

Retention retention_stats(std::size_t raw_n, std::size_t clean_n) {
  if (raw_n == 0) throw Error(ErrorCode::EmptyInput, "no raw points");
  if (clean_n > raw_n) throw Error(ErrorCode::EmptyInput, "more clean than raw points");
  const double retention = round_to(100.0 * static_cast<double>(clean_n) / static_cast<double>(raw_n), 1);
  return {retention, round_to(100.0 - retention, 1)};
}

double reduction_vs_baseline(std::size_t n, std::size_t n_base) {
  if (n_base == 0) throw Error(ErrorCode::EmptyInput, "baseline has no points");
  return round_to(100.0 * (1.0 - static_cast<double>(n) / static_cast<double>(n_base)), 1);
}

std::vector<TimedValue> to_series(std::span<const geodesy::SpeedSample> speeds) {
  std::vector<TimedValue> out;
  out.reserve(speeds.size());
  for (const auto& s : speeds) out.push_back({s.t, s.kmh});
  return out;
}

RmseResult rmse(std::span<const TimedValue> a, std::span<const TimedValue> b) {
  std::map<double, double> lookup;
  for (const auto& v : b) lookup.emplace(v.t, v.value);
  std::vector<double> diffs;
  for (const auto& v : a)
    if (const auto it = lookup.find(v.t); it != lookup.end()) diffs.push_back(v.value - it->second);
  if (diffs.empty()) throw Error(ErrorCode::NoAlignment, "series share no timestamps");
  double sum = 0.0, sq = 0.0;
  for (double d : diffs) {
    sum += d;
    sq += d * d;
  }
  const double n = static_cast<double>(diffs.size());
  const double mean = sum / n;
  double var = 0.0;
  for (double d : diffs) var += (d - mean) * (d - mean);
  return {std::sqrt(sq / n), std::sqrt(var / n), diffs.size()};
}

SpeedStats speed_stats(std::span<const double> speeds, double bin_width) {
  if (speeds.empty()) throw Error(ErrorCode::EmptyInput, "no speeds");
  if (!(bin_width > 0.0)) throw Error(ErrorCode::ConfigError, "histogram bin width must be positive");
  SpeedStats s;
  double sum = 0.0;
  s.max = speeds.front();
  for (double v : speeds) {
    sum += v;
    s.max = std::max(s.max, v);
  }
  s.mean = sum / static_cast<double>(speeds.size());
  double var = 0.0;
  for (double v : speeds) var += (v - s.mean) * (v - s.mean);
  s.sigma = std::sqrt(var / static_cast<double>(speeds.size()));
  s.histogram.bin_width = bin_width;
  s.histogram.counts.assign(static_cast<std::size_t>(std::floor(std::max(0.0, s.max) / bin_width)) + 1, 0);
  for (double v : speeds)
    ++s.histogram.counts[static_cast<std::size_t>(std::floor(std::max(0.0, v) / bin_width))];
  return s;
}

AltitudeStats altitude_stats(const FlightTrack& track) {
  std::vector<double> alts;
  for (const auto& r : track.records)
    if (r.altitude) alts.push_back(*r.altitude);
  if (alts.empty()) throw Error(ErrorCode::NoAltitudeData, "no record carries an altitude");
  AltitudeStats s;
  s.samples = alts.size();
  s.missing = track.size() - alts.size();
  s.peak = *std::max_element(alts.begin(), alts.end());
  double sum = 0.0;
  for (double a : alts) sum += a;
  s.mean = sum / static_cast<double>(alts.size());
  double var = 0.0;
  for (double a : alts) var += (a - s.mean) * (a - s.mean);
  const double sigma = std::sqrt(var / static_cast<double>(alts.size()));
  s.sigma_over_mean_pct = s.mean != 0.0 ? 100.0 * sigma / std::abs(s.mean) : 0.0;
  return s;
}

double point_spacing_stats(const FlightTrack& track, const geodesy::DistanceMethod& method) {
  const auto pts = track.points();
  const auto d = geodesy::consecutive_distances(pts, method);
  double sum = 0.0;
  for (double v : d) sum += v;
  return sum / static_cast<double>(d.size());
}

MethodReport summarize_methods(const FlightTrack& track, int interval_s,
                               const geodesy::MethodConstants& constants) {
  MethodReport report;
  report.interval_s = interval_s;
  report.points = track.size();
  const auto pts = track.points();
  const auto times = track.times();
  const double duration = times.back() - times.front();
  for (const auto& method : constants.all_methods()) {
    MethodSummary m;
    m.method = geodesy::method_name(method);
    const auto speeds = geodesy::segment_speeds(pts, times, method);
    const double dist = geodesy::path_length(pts, method);
    m.distance_km = dist / 1000.0;
    std::vector<double> values;
    for (const auto& s : speeds) values.push_back(s.kmh);
    const auto st = speed_stats(values);
    m.mean_speed_kmh = st.mean;
    m.max_speed_kmh = st.max;
    m.sigma_speed_kmh = st.sigma;
    m.overall_speed_kmh = duration > 0.0 ? 3.6 * dist / duration : 0.0;
    m.speeds = to_series(speeds);
    report.methods.push_back(std::move(m));
  }
  const std::size_t k = report.methods.size();
  report.rmse.assign(k, std::vector<double>(k, 0.0));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j)
      report.rmse[i][j] = report.rmse[j][i] = rmse(report.methods[i].speeds, report.methods[j].speeds).rmse;
  const auto& utm = report.methods.front();
  for (const auto& m : report.methods) {
    report.distance_pct_vs_utm.push_back(
        utm.distance_km > 0.0 ? 100.0 * (m.distance_km - utm.distance_km) / utm.distance_km : 0.0);
    report.mean_speed_pct_vs_utm.push_back(
        utm.mean_speed_kmh > 0.0 ? 100.0 * (m.mean_speed_kmh - utm.mean_speed_kmh) / utm.mean_speed_kmh : 0.0);
  }
  return report;
}

std::vector<MethodReport> compare_methods(const FlightTrack& track, std::span<const int> intervals,
                                          const geodesy::MethodConstants& constants,
                                          const std::optional<trajectory::FilterParams>& filter) {
  std::vector<MethodReport> out;
  for (int interval : intervals) {
    FlightTrack sampled = resample(track, interval);
    if (filter) sampled = trajectory::two_stage_filter(sampled, *filter).clean;
    if (sampled.size() < 2)
      throw Error(ErrorCode::TooShort, "interval " + std::to_string(interval) + " s leaves fewer than two points");
    out.push_back(summarize_methods(sampled, interval, constants));
  }
  return out;
}

SamplingReport build_sampling_report(std::span<const IntervalTracks> tracks,
                                     const geodesy::MethodConstants& constants, double histogram_bin_kmh) {
  if (tracks.empty()) throw Error(ErrorCode::EmptyInput, "no intervals to report");
  SamplingReport report;
  report.constants = constants;
  const auto base_it = std::min_element(tracks.begin(), tracks.end(),
                                        [](const auto& a, const auto& b) { return a.interval_s < b.interval_s; });
  report.baseline_interval = base_it->interval_s;
  const geodesy::DistanceMethod hav = geodesy::Haversine{constants.earth_radius_m};

  std::vector<TimedValue> baseline_speeds;
  if (base_it->clean.size() >= 2)
    baseline_speeds = to_series(geodesy::segment_speeds(base_it->clean.points(), base_it->clean.times(), hav));

  for (const auto& it : tracks) {
    IntervalReport r;
    r.interval_s = it.interval_s;
    r.raw_count = it.raw.size();
    r.clean_count = it.clean.size();
    if (r.raw_count > 0) r.retention = retention_stats(r.raw_count, r.clean_count);
    if (!base_it->clean.empty()) r.reduction_vs_baseline_pct = reduction_vs_baseline(r.clean_count, base_it->clean.size());
    if (it.raw.size() >= 2) r.raw_path_length_m = geodesy::path_length(it.raw.points(), hav);
    if (it.clean.size() >= 2) {
      r.clean_path_length_m = geodesy::path_length(it.clean.points(), hav);
      r.mean_spacing_m = point_spacing_stats(it.clean, hav);
      const auto pts = it.clean.points();
      const auto times = it.clean.times();
      for (const auto& method : constants.all_methods()) {
        const auto speeds = geodesy::segment_speeds(pts, times, method);
        std::vector<double> values;
        for (const auto& s : speeds) values.push_back(s.kmh);
        const auto st = speed_stats(values, histogram_bin_kmh);
        const double duration = times.back() - times.front();
        const double dist = geodesy::path_length(pts, method);
        const double overall = 3.6 * dist / duration;
        r.speeds.push_back({geodesy::method_name(method), dist / 1000.0, st.mean, st.max, st.sigma, overall});
        if (std::holds_alternative<geodesy::Haversine>(method)) {
          r.speed_histogram = st.histogram;
          r.speed_series = to_series(speeds);
        }
      }
      if (!baseline_speeds.empty()) {
        try {
          r.rmse_vs_baseline = rmse(r.speed_series, baseline_speeds);
        } catch (const Error&) {
          // no shared timestamps after cleaning; leave empty
        }
      }
    }
    try {
      r.altitude = altitude_stats(it.clean);
    } catch (const Error&) {
    }
    report.intervals.push_back(std::move(r));
  }
  std::sort(report.intervals.begin(), report.intervals.end(),
            [](const auto& a, const auto& b) { return a.interval_s < b.interval_s; });
  return report;
}

}  // namespace hudtrack::analysis
