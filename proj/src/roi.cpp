#include "hudtrack/roi.hpp"

#include <algorithm>
#include <set>

#include "hudtrack/error.hpp"
#include "hudtrack/font.hpp"

namespace hudtrack::roi {

namespace {

constexpr int kOutlinePx = 2;
constexpr int kLabelScale = 1;

}  // namespace

std::string to_string(const RoiKind& kind) {
  switch (kind.kind) {
    case Kind::Latitude: return "latitude";
    case Kind::Longitude: return "longitude";
    case Kind::Altitude: return "altitude";
    case Kind::Battery: return "battery";
    case Kind::AirSpeed: return "airspeed";
    case Kind::VerticalSpeed: return "vspeed";
    case Kind::CapacityUsed: return "capacity";
    case Kind::Auxiliary: return "aux:" + kind.aux_name;
  }
  return "aux:";
}

RoiKind kind_from_string(const std::string& text) {
  if (text == "latitude") return {Kind::Latitude, {}};
  if (text == "longitude") return {Kind::Longitude, {}};
  if (text == "altitude") return {Kind::Altitude, {}};
  if (text == "battery") return {Kind::Battery, {}};
  if (text == "airspeed") return {Kind::AirSpeed, {}};
  if (text == "vspeed") return {Kind::VerticalSpeed, {}};
  if (text == "capacity") return {Kind::CapacityUsed, {}};
  if (text.rfind("aux:", 0) == 0 && text.size() > 4) return {Kind::Auxiliary, text.substr(4)};
  throw Error(ErrorCode::ConfigError, "unknown ROI kind '" + text + "'");
}

std::string to_string(IssueCode code) {
  switch (code) {
    case IssueCode::OutOfBounds: return "OutOfBounds";
    case IssueCode::EmptyRect: return "EmptyRect";
    case IssueCode::DuplicateLabel: return "DuplicateLabel";
    case IssueCode::EmptyLabel: return "EmptyLabel";
    case IssueCode::MissingIntDigits: return "MissingIntDigits";
    case IssueCode::DuplicateCoordinateKind: return "DuplicateCoordinateKind";
    case IssueCode::BadFrameDimensions: return "BadFrameDimensions";
    case IssueCode::NoCoordinateRois: return "NoCoordinateRois";
  }
  return "Unknown";
}

const RoiSpec* RoiConfig::find(const std::string& label) const {
  auto it = std::find_if(rois.begin(), rois.end(), [&](const RoiSpec& r) { return r.label == label; });
  return it == rois.end() ? nullptr : &*it;
}

ValidationReport validate_config(const RoiConfig& cfg) {
  ValidationReport report;
  auto error = [&](const std::string& label, IssueCode code, std::string msg) {
    report.errors.push_back({label, code, std::move(msg)});
  };
  if (cfg.frame_width < 1 || cfg.frame_height < 1)
    error("", IssueCode::BadFrameDimensions, "frame dimensions must be positive");

  std::set<std::string> labels;
  int lat = 0, lon = 0;
  for (const auto& r : cfg.rois) {
    if (r.label.empty()) error(r.label, IssueCode::EmptyLabel, "ROI label must not be empty");
    if (!labels.insert(r.label).second)
      error(r.label, IssueCode::DuplicateLabel, "label '" + r.label + "' used more than once");
    const Rect& rc = r.rect;
    if (rc.w < 1 || rc.h < 1) {
      error(r.label, IssueCode::EmptyRect, "width and height must be >= 1");
    } else if (rc.x < 0 || rc.y < 0 || static_cast<long>(rc.x) + rc.w > cfg.frame_width ||
               static_cast<long>(rc.y) + rc.h > cfg.frame_height) {
      error(r.label, IssueCode::OutOfBounds,
            "rect (" + std::to_string(rc.x) + "," + std::to_string(rc.y) + "," +
                std::to_string(rc.w) + "," + std::to_string(rc.h) + ") exceeds " +
                std::to_string(cfg.frame_width) + "x" + std::to_string(cfg.frame_height));
    }
    if (r.kind.is_coordinate() && (!r.int_digits || *r.int_digits < 1 || *r.int_digits > 3))
      error(r.label, IssueCode::MissingIntDigits,
            "coordinate ROIs need int_digits in [1,3]");
    if (r.kind.kind == Kind::Latitude && ++lat > 1)
      error(r.label, IssueCode::DuplicateCoordinateKind, "more than one latitude ROI");
    if (r.kind.kind == Kind::Longitude && ++lon > 1)
      error(r.label, IssueCode::DuplicateCoordinateKind, "more than one longitude ROI");
  }
  if (lat == 0 || lon == 0)
    report.warnings.push_back({"", IssueCode::NoCoordinateRois,
                               "no coordinate ROIs: spatial analysis disabled"});
  return report;
}

GrayImage crop_roi(const GrayImage& frame, const RoiSpec& spec) {
  const Rect& r = spec.rect;
  if (r.w < 1 || r.h < 1 || r.x < 0 || r.y < 0 || r.x + r.w > frame.width() ||
      r.y + r.h > frame.height())
    throw Error(ErrorCode::OutOfBounds, "ROI '" + spec.label + "' outside " +
                                            std::to_string(frame.width()) + "x" +
                                            std::to_string(frame.height()) + " frame");
  GrayImage out(r.w, r.h);
  for (int y = 0; y < r.h; ++y)
    for (int x = 0; x < r.w; ++x) out.at(x, y) = frame.at(r.x + x, r.y + y);
  return out;
}

EnhanceProfile enhance_profile(const RoiKind& kind, const imaging::PreprocessParams& params) {
  if (kind.is_coordinate()) return {15, 6, params.roi_coordinate_clip};
  return {5, 2, params.roi_auxiliary_clip};
}

GrayImage enhance_roi(const GrayImage& crop, const RoiKind& kind,
                      const imaging::PreprocessParams& params) {
  if (crop.empty()) throw Error(ErrorCode::OutOfBounds, "empty ROI crop");
  const auto profile = enhance_profile(kind, params);
  GrayImage img = imaging::border_median(crop) < 128 ? imaging::invert(crop) : crop;
  img = imaging::pad_border(img, profile.pad_px, std::nullopt);
  img = imaging::upscale(img, profile.scale);
  const imaging::TileGrid tiles{std::min(params.clahe_tiles.cols, img.width()),
                                std::min(params.clahe_tiles.rows, img.height())};
  img = imaging::clahe(img, profile.clip, tiles);
  return imaging::adaptive_threshold(img, params.threshold_block, params.threshold_bias);
}

Rect preview_label_box(const RoiSpec& spec, int frame_width, int frame_height) {
  const int w = font::text_width(spec.label, kLabelScale);
  const int h = font::text_height(kLabelScale);
  const Rect& r = spec.rect;
  int y = r.y - h - 2;
  if (y < 0) y = r.y + kOutlinePx + 1;
  const int x = std::clamp(r.x, 0, std::max(0, frame_width - w));
  return Rect{x, std::clamp(y, 0, std::max(0, frame_height - h)), w, h};
}

RgbImage render_preview(const GrayImage& frame, const RoiConfig& cfg) {
  const auto report = validate_config(cfg);
  if (!report.ok())
    throw Error(ErrorCode::ValidationFailed, report.errors.front().label + ": " + report.errors.front().message);
  if (cfg.frame_width != frame.width() || cfg.frame_height != frame.height())
    throw Error(ErrorCode::ValidationFailed, "ROI config frame size does not match the frame");
  RgbImage out(frame);
  for (const auto& spec : cfg.rois) {
    const Rect& r = spec.rect;
    for (int y = r.y; y < r.y + r.h; ++y)
      for (int x = r.x; x < r.x + r.w; ++x) {
        const bool edge = x < r.x + kOutlinePx || x >= r.x + r.w - kOutlinePx ||
                          y < r.y + kOutlinePx || y >= r.y + r.h - kOutlinePx;
        if (edge) out.at(x, y) = kOutlineColor;
      }
  }
  for (const auto& spec : cfg.rois) {
    const Rect box = preview_label_box(spec, frame.width(), frame.height());
    std::string printable;
    for (char c : spec.label) printable += font::has_glyph(c) ? c : '_';
    font::draw_text(out, box.x, box.y, printable, kLabelScale, kLabelColor);
  }
  return out;
}

}  // namespace hudtrack::roi
