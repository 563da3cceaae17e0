#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hudtrack/geodesy.hpp"
#include "hudtrack/image.hpp"
#include "hudtrack/roi.hpp"
#include "hudtrack/telemetry.hpp"

namespace hudtrack::synth {

struct FlightSimParams {
  std::uint64_t seed = 1;
  int duration_s = 121;
  geodesy::GeoPoint start{47.07, 15.44};
  double speed_min_kmh = 50.0;
  double speed_max_kmh = 90.0;
  double altitude_min_m = 1400.0;
  double altitude_max_m = 1500.0;
  double heading_volatility_deg_s = 6.0;
  std::optional<double> initial_heading_deg;  // random when empty

  /// Throws Error{ConfigError}.
  void validate() const;
};

/// 1 Hz ground truth. Heading and speed follow clipped random walks and each
/// position is stepped from the previous one along a great circle, so the
/// Haversine speed of segment i is exactly the record's airspeed. vspeed_i
/// is alt_{i+1} - alt_i (the last record repeats its predecessor).
FlightTrack simulate_flight(const FlightSimParams& p);

struct FieldAnchor {
  std::string label;
  roi::RoiKind kind;
  int x = 0;
  int y = 0;
  int max_chars = 8;
  std::optional<int> int_digits;
};

struct HudStyle {
  int width = 640;
  int height = 360;
  int scale = 2;
  std::uint8_t foreground = 235;
  std::uint8_t background = 30;
  int margin = 4;
  std::vector<FieldAnchor> layout;

  /// Throws Error{LayoutError}.
  void validate() const;
};

/// Default frame with all seven telemetry fields laid out like a typical
/// FPV OSD. `lon_int_digits` sizes the longitude box.
HudStyle default_style(int lon_int_digits = 2);

/// The exact text the HUD shows for `kind`, or empty when the record lacks it.
std::string display_text(const TelemetryRecord& rec, const roi::RoiKind& kind);

struct RenderedHud {
  GrayImage frame;
  /// Tight boxes: each glyph string plus the style margin.
  roi::RoiConfig rois;
};

/// Throws Error{LayoutError} when a field does not fit its anchor box.
RenderedHud render_hud(const TelemetryRecord& rec, const HudStyle& style);

/// Fixed boxes sized for `max_chars`, valid for every frame of the flight.
roi::RoiConfig layout_config(const HudStyle& style);

/// pixel' = clamp(round((pixel - 128) * contrast + 128 + N(0, sigma))).
GrayImage corrupt(const GrayImage& img, double sigma, double contrast, std::uint64_t seed);

/// Displaces `count` distinct records by a random distance in
/// [min_m, max_m] along a random bearing, redrawing the bearing until the
/// moved point is more than `clearance_m` from the original track in UTM.
/// Returns the displaced positions in ascending order.
std::vector<std::size_t> inject_coordinate_outliers(FlightTrack& track, int count, double min_m, double max_m,
                                                    double clearance_m, std::uint64_t seed);

struct DatasetSpec {
  FlightSimParams flight;
  HudStyle style = default_style();
  double noise_sigma = 0.0;
  double contrast = 1.0;
  std::uint64_t noise_seed = 7;
  std::string extension = ".png";
};

struct Dataset {
  FlightTrack truth;
  roi::RoiConfig rois;
};

/// Writes frames/frame_NNNNNN.<ext>, truth.csv, rois.json and a run.json
/// pipeline config into `dir` (1 frame per second).
Dataset write_dataset(const DatasetSpec& spec, const std::filesystem::path& dir);

}  // namespace hudtrack::synth
