#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hudtrack/geodesy.hpp"
#include "hudtrack/ocr.hpp"

namespace hudtrack {

struct BatteryLevel {
  double value = 0.0;
  ocr::Unit unit = ocr::Unit::Percent;  // Percent or Volts
  friend bool operator==(const BatteryLevel&, const BatteryLevel&) = default;
};

/// Why one field of a frame did not produce a value.
struct FieldIssue {
  std::string field;  // "latitude", "altitude", ...
  std::string code;   // ErrorCode name, "Unreadable" or "NoGlyphs"
  friend bool operator==(const FieldIssue&, const FieldIssue&) = default;
};

struct TelemetryRecord {
  double t = 0.0;
  double lat = 0.0;
  double lon = 0.0;
  std::optional<double> altitude;       // m
  std::optional<double> airspeed;       // km/h
  std::optional<double> vspeed;         // m/s
  std::optional<BatteryLevel> battery;  // % or V
  std::optional<double> capacity_used;  // mAh
  int frame_index = 0;
  std::vector<FieldIssue> field_status;

  geodesy::GeoPoint point() const { return {lat, lon}; }
  friend bool operator==(const TelemetryRecord&, const TelemetryRecord&) = default;
};

/// Time-ordered WGS84 track.
struct FlightTrack {
  std::vector<TelemetryRecord> records;
  std::string crs = "WGS84";

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
  std::vector<geodesy::GeoPoint> points() const;
  std::vector<double> times() const;

  /// Throws Error{TimeOrderError} / Error{RangeInvalid} on a broken invariant.
  void validate() const;
};

/// "ok" when no issues, else "field:Code;field:Code".
std::string format_status(const std::vector<FieldIssue>& issues);
std::vector<FieldIssue> parse_status(const std::string& text);

}  // namespace hudtrack
