#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "hudtrack/analysis.hpp"
#include "hudtrack/telemetry.hpp"
#include "hudtrack/trajectory.hpp"

namespace hudtrack::exporter {

inline constexpr std::string_view kCsvHeader =
    "t_s,frame,lat,lon,alt_m,airspeed_kmh,vspeed_ms,battery,capacity_mah,status";

/// Fixed-point text with '.' as separator, independent of the C locale.
std::string format_fixed(double value, int decimals);

/// Shortest text that parses back to the same double.
std::string format_shortest(double value);

/// Degrees at 6 decimals, metres, km/h, m/s, battery and mAh at 1 decimal.
std::string track_to_csv(const FlightTrack& track);

/// Throws Error{DecodeError} on a malformed table.
FlightTrack track_from_csv(std::string_view text);

/// Throws Error{EmptyTrack} or Error{IoError}.
void write_track_csv(const FlightTrack& track, const std::filesystem::path& path);
FlightTrack read_track_csv(const std::filesystem::path& path);

struct KmlOptions {
  std::string run_id = "hudtrack";
  bool extrude = true;
};

/// Throws Error{TooShort} for fewer than two points.
std::string track_to_kml(const FlightTrack& track, const KmlOptions& options);

/// Archive holding a single doc.kml.
void write_kmz(const FlightTrack& track, const std::filesystem::path& path, const KmlOptions& options);

/// One LineString feature followed by one Point feature per record.
nlohmann::json track_to_geojson(const FlightTrack& track);
void write_geojson(const FlightTrack& track, const std::filesystem::path& path);

nlohmann::json to_json(const analysis::SamplingReport& report);
nlohmann::json to_json(const analysis::MethodReport& report);
nlohmann::json to_json(std::span<const trajectory::DropEntry> dropped);
nlohmann::json to_json(const trajectory::TwoStageResult& result);

/// Pretty-printed with a trailing newline, written atomically.
void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

struct ChartSet {
  std::string counts_svg;   // raw vs clean bars, removal trend
  std::string speeds_svg;   // speed profiles, RMSE vs interval
  std::string methods_svg;  // per-method distance and mean speed
};

/// Throws Error{NothingToRender} when the report has no interval.
ChartSet render_charts(const analysis::SamplingReport& report);

/// Writes counts.svg, speeds.svg and methods.svg into `dir`.
void write_charts(const ChartSet& charts, const std::filesystem::path& dir);

}  // namespace hudtrack::exporter
