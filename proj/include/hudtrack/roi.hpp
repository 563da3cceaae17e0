#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hudtrack/image.hpp"
#include "hudtrack/imaging.hpp"

namespace hudtrack::roi {

enum class Kind {
  Latitude,
  Longitude,
  Altitude,
  Battery,
  AirSpeed,
  VerticalSpeed,
  CapacityUsed,
  Auxiliary,
};

/// Telemetry field a rectangle locates. Auxiliary kinds carry a free name.
struct RoiKind {
  Kind kind = Kind::Auxiliary;
  std::string aux_name;

  bool is_coordinate() const { return kind == Kind::Latitude || kind == Kind::Longitude; }
  friend bool operator==(const RoiKind&, const RoiKind&) = default;
};

/// "latitude", "longitude", "altitude", "battery", "airspeed", "vspeed",
/// "capacity", or "aux:<name>".
std::string to_string(const RoiKind& kind);
RoiKind kind_from_string(const std::string& text);

struct Rect {
  int x = 0, y = 0, w = 0, h = 0;
  friend bool operator==(const Rect&, const Rect&) = default;
};

struct RoiSpec {
  std::string label;
  RoiKind kind;
  Rect rect;
  std::optional<int> int_digits;
  friend bool operator==(const RoiSpec&, const RoiSpec&) = default;
};

struct RoiConfig {
  int version = 1;
  int frame_width = 0;
  int frame_height = 0;
  std::vector<RoiSpec> rois;

  const RoiSpec* find(const std::string& label) const;
  friend bool operator==(const RoiConfig&, const RoiConfig&) = default;
};

enum class IssueCode {
  OutOfBounds,
  EmptyRect,
  DuplicateLabel,
  EmptyLabel,
  MissingIntDigits,
  DuplicateCoordinateKind,
  BadFrameDimensions,
  NoCoordinateRois,
};

std::string to_string(IssueCode code);

struct Issue {
  std::string label;  // empty for config-level issues
  IssueCode code;
  std::string message;
};

struct ValidationReport {
  std::vector<Issue> errors;
  std::vector<Issue> warnings;
  bool ok() const { return errors.empty(); }
};

ValidationReport validate_config(const RoiConfig& cfg);

/// Throws Error{OutOfBounds}.
GrayImage crop_roi(const GrayImage& frame, const RoiSpec& spec);

struct EnhanceProfile {
  int pad_px;
  int scale;
  double clip;
};

/// Coordinate-class ROIs: 15 px pad, 6x; auxiliary-class: 5 px pad, 2x.
EnhanceProfile enhance_profile(const RoiKind& kind, const imaging::PreprocessParams& params);

/// Crop-level recognition chain: auto-pad, upscale, CLAHE, adaptive
/// threshold. Light-on-dark crops (dark border ring) are inverted first so
/// glyphs always come out as 0 on a 255 background. CLAHE tiles are clamped
/// to the enhanced image size.
GrayImage enhance_roi(const GrayImage& crop, const RoiKind& kind,
                      const imaging::PreprocessParams& params);

inline constexpr Rgb kOutlineColor{255, 0, 0};
inline constexpr Rgb kLabelColor{255, 255, 0};

/// Frame copy with every rect outlined (2 px, inside the rect) and its label
/// drawn above it, or just inside the top edge when there is no room.
/// Throws Error{ValidationFailed}.
RgbImage render_preview(const GrayImage& frame, const RoiConfig& cfg);

/// Pixel box the label of `spec` occupies in a preview.
Rect preview_label_box(const RoiSpec& spec, int frame_width, int frame_height);

}  // namespace hudtrack::roi
