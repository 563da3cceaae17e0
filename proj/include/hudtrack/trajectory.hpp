#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hudtrack/error.hpp"
#include "hudtrack/ingest.hpp"
#include "hudtrack/ocr.hpp"
#include "hudtrack/roi.hpp"
#include "hudtrack/telemetry.hpp"

namespace hudtrack::trajectory {

/// One ROI's recognition result for one frame.
struct FieldReading {
  std::string label;
  roi::RoiKind kind;
  std::optional<int> int_digits;
  ocr::OcrReading reading;
  std::optional<ErrorCode> engine_error;  // recognizer failure, if any
};

struct FrameReadings {
  int frame_index = 0;
  std::vector<FieldReading> fields;
};

struct DropEntry {
  int frame_index = 0;
  double t = 0.0;
  std::string reason;
};

struct AssembledTrack {
  FlightTrack track;
  std::vector<DropEntry> dropped;
};

/// A frame yields a record iff both latitude and longitude parse; other
/// fields attach when they parse and are otherwise noted in field_status.
/// Readings below `confidence_floor` count as Unreadable.
/// Throws Error{EmptyTrack}.
AssembledTrack assemble_track(std::span<const FrameReadings> frames, const ingest::SamplingPlan& plan,
                              double confidence_floor = ocr::kDefaultConfidenceFloor);

struct FilterParams {
  int median_window = 5;
  double mad_multiplier = 6.0;
  double mad_floor_deg = 0.02;
  double buffer_m = 2000.0;
  std::optional<int> utm_zone;
  bool revalidate_rejected = false;

  /// Throws Error{ConfigError}.
  void validate() const;
};

struct FilterResult {
  FlightTrack clean;
  std::vector<TelemetryRecord> removed;
  /// Positions of the removed records in the input track.
  std::vector<std::size_t> removed_indices;
};

/// Rolling-median outlier rejection, applied to latitude and longitude
/// independently over a centred window truncated at the track ends.
FilterResult median_outlier_filter(const FlightTrack& track, const FilterParams& p);

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Minimum Euclidean distance from `pt` to any segment (or the lone vertex).
double point_to_polyline_distance(Point2 pt, std::span<const Point2> polyline);

/// Keeps candidates within `buffer_m` of the baseline polyline in UTM space.
///
/// A candidate that is itself a baseline vertex (same frame and time) is
/// measured against the polyline with that vertex bridged out, otherwise
/// every survivor would trivially lie on the line. The candidate farthest
/// beyond the buffer is removed first (from the baseline too) and distances
/// are recomputed, so neighbouring outliers cannot shield one another.
FilterResult utm_buffer_filter(const FlightTrack& track, const FlightTrack& baseline,
                               const FilterParams& p);

struct TwoStageResult {
  FilterResult stage1;
  FilterResult stage2;
  FlightTrack clean;
  /// Removed records tagged with the stage ("median" or "buffer").
  std::vector<std::pair<TelemetryRecord, std::string>> removed;
};

TwoStageResult two_stage_filter(const FlightTrack& raw, const FilterParams& p);

}  // namespace hudtrack::trajectory
