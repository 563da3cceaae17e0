#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hudtrack/geodesy.hpp"
#include "hudtrack/telemetry.hpp"
#include "hudtrack/trajectory.hpp"

namespace hudtrack::analysis {

/// Rounds half away from zero to `decimals` places.
double round_to(double value, int decimals);

/// Keeps records whose timestamp is a whole multiple of `interval_s`.
/// Throws Error{EmptyTrack} when nothing survives.
FlightTrack resample(const FlightTrack& track, int interval_s);

struct Retention {
  double retention_pct = 0.0;  // rounded to 0.1
  double removal_pct = 0.0;
};

/// Throws Error{EmptyInput} when raw_n is 0.
Retention retention_stats(std::size_t raw_n, std::size_t clean_n);

/// 100 * (1 - n / n_base), rounded to 0.1.
double reduction_vs_baseline(std::size_t n, std::size_t n_base);

struct TimedValue {
  double t = 0.0;
  double value = 0.0;
};

std::vector<TimedValue> to_series(std::span<const geodesy::SpeedSample> speeds);

struct RmseResult {
  double rmse = 0.0;
  double sigma = 0.0;  // population sigma of the aligned differences
  std::size_t aligned = 0;
};

/// Aligns on the timestamp intersection. Throws Error{NoAlignment}.
RmseResult rmse(std::span<const TimedValue> a, std::span<const TimedValue> b);

struct Histogram {
  double bin_width = 5.0;
  std::vector<std::size_t> counts;  // bin k covers [k*w, (k+1)*w)
};

struct SpeedStats {
  double mean = 0.0;
  double max = 0.0;
  double sigma = 0.0;  // population
  Histogram histogram;
};

/// Throws Error{EmptyInput}.
SpeedStats speed_stats(std::span<const double> speeds, double bin_width = 5.0);

struct AltitudeStats {
  double peak = 0.0;
  double mean = 0.0;
  double sigma_over_mean_pct = 0.0;
  std::size_t samples = 0;
  std::size_t missing = 0;
};

/// Throws Error{NoAltitudeData}.
AltitudeStats altitude_stats(const FlightTrack& track);

/// Mean consecutive distance in metres. Throws Error{TooShort}.
double point_spacing_stats(const FlightTrack& track, const geodesy::DistanceMethod& method);

struct MethodSummary {
  std::string method;
  double distance_km = 0.0;
  double mean_speed_kmh = 0.0;
  double max_speed_kmh = 0.0;
  double sigma_speed_kmh = 0.0;
  /// total distance / total time, the secondary mean-speed definition.
  double overall_speed_kmh = 0.0;
  std::vector<TimedValue> speeds;
};

struct MethodReport {
  int interval_s = 1;
  std::size_t points = 0;
  std::vector<MethodSummary> methods;   // utm, haversine, raw
  std::vector<std::vector<double>> rmse;  // pairwise speed RMSE, km/h
  std::vector<double> distance_pct_vs_utm;
  std::vector<double> mean_speed_pct_vs_utm;
};

/// Per-method distance and speed summary of one track (>= 2 points).
MethodReport summarize_methods(const FlightTrack& track, int interval_s,
                               const geodesy::MethodConstants& constants);

/// resample -> optional two-stage filter -> summarize_methods, per interval.
std::vector<MethodReport> compare_methods(const FlightTrack& track, std::span<const int> intervals,
                                          const geodesy::MethodConstants& constants,
                                          const std::optional<trajectory::FilterParams>& filter);

struct IntervalTracks {
  int interval_s = 1;
  FlightTrack raw;
  FlightTrack clean;
};

struct MethodSpeed {
  std::string method;
  double distance_km = 0.0;
  double mean = 0.0;
  double max = 0.0;
  double sigma = 0.0;
  double overall = 0.0;
};

struct IntervalReport {
  int interval_s = 1;
  std::size_t raw_count = 0;
  std::size_t clean_count = 0;
  Retention retention;
  double reduction_vs_baseline_pct = 0.0;
  std::optional<double> mean_spacing_m;  // haversine, clean track
  std::optional<double> clean_path_length_m;
  std::optional<double> raw_path_length_m;
  std::vector<MethodSpeed> speeds;
  std::optional<Histogram> speed_histogram;  // haversine
  std::vector<TimedValue> speed_series;      // haversine
  std::optional<AltitudeStats> altitude;
  std::optional<RmseResult> rmse_vs_baseline;  // haversine speeds
};

struct SamplingReport {
  int baseline_interval = 1;
  geodesy::MethodConstants constants;
  std::vector<IntervalReport> intervals;
};

/// The smallest interval is the baseline. Throws Error{EmptyInput}.
SamplingReport build_sampling_report(std::span<const IntervalTracks> tracks,
                                     const geodesy::MethodConstants& constants,
                                     double histogram_bin_kmh = 5.0);

}  // namespace hudtrack::analysis
