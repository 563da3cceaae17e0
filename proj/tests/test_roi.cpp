#include <algorithm>
#include <set>

#include "helpers.hpp"
#include "hudtrack/font.hpp"
#include "hudtrack/roi.hpp"

using namespace hudtrack;
using testing::error_code_of;

namespace {

roi::RoiConfig sample_config() {
  roi::RoiConfig cfg;
  cfg.frame_width = 200;
  cfg.frame_height = 100;
  cfg.rois = {{"lat", {roi::Kind::Latitude, {}}, {10, 20, 60, 12}, 2},
              {"lon", {roi::Kind::Longitude, {}}, {10, 40, 66, 12}, 3},
              {"alt", {roi::Kind::Altitude, {}}, {120, 70, 40, 12}, std::nullopt}};
  return cfg;
}

bool has_code(const std::vector<roi::Issue>& issues, roi::IssueCode code) {
  return std::any_of(issues.begin(), issues.end(), [&](const auto& i) { return i.code == code; });
}

}  // namespace

TEST_CASE("kind names round trip") {
  for (const char* name : {"latitude", "longitude", "altitude", "battery", "airspeed", "vspeed", "capacity", "aux:gps_sats"})
    CHECK(roi::to_string(roi::kind_from_string(name)) == name);
  CHECK(error_code_of([] { roi::kind_from_string("heading"); }) == ErrorCode::ConfigError);
  CHECK(error_code_of([] { roi::kind_from_string("aux:"); }) == ErrorCode::ConfigError);
}

TEST_CASE("validate_config accepts a sane layout") {
  const auto report = roi::validate_config(sample_config());
  CHECK(report.ok());
  CHECK(report.warnings.empty());
}

TEST_CASE("validate_config reports each rule") {
  auto cfg = sample_config();
  cfg.rois[0].rect = {190, 20, 20, 10};
  cfg.rois[1].label = "lat";
  cfg.rois[2].rect.w = 0;
  auto report = roi::validate_config(cfg);
  CHECK(has_code(report.errors, roi::IssueCode::OutOfBounds));
  CHECK(has_code(report.errors, roi::IssueCode::DuplicateLabel));
  CHECK(has_code(report.errors, roi::IssueCode::EmptyRect));

  cfg = sample_config();
  cfg.rois[0].int_digits.reset();
  cfg.rois[1].kind = {roi::Kind::Latitude, {}};
  report = roi::validate_config(cfg);
  CHECK(has_code(report.errors, roi::IssueCode::MissingIntDigits));
  CHECK(has_code(report.errors, roi::IssueCode::DuplicateCoordinateKind));

  cfg = sample_config();
  cfg.rois.resize(1);
  report = roi::validate_config(cfg);
  CHECK(report.ok());
  CHECK(has_code(report.warnings, roi::IssueCode::NoCoordinateRois));

  cfg.frame_width = 0;
  CHECK(has_code(roi::validate_config(cfg).errors, roi::IssueCode::BadFrameDimensions));
  cfg = sample_config();
  cfg.rois[2].label = "";
  CHECK(has_code(roi::validate_config(cfg).errors, roi::IssueCode::EmptyLabel));
}

TEST_CASE("crop_roi extracts the designated pixels") {
  GrayImage img(6, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 6; ++x) img.at(x, y) = static_cast<std::uint8_t>(10 * y + x);
  const roi::RoiSpec spec{"f", {roi::Kind::Altitude, {}}, {2, 1, 3, 2}, std::nullopt};
  const auto c = roi::crop_roi(img, spec);
  CHECK(std::vector<std::uint8_t>(c.pixels().begin(), c.pixels().end()) == std::vector<std::uint8_t>{12, 13, 14, 22, 23, 24});
  const roi::RoiSpec full{"f", {roi::Kind::Altitude, {}}, {0, 0, 6, 4}, std::nullopt};
  CHECK(roi::crop_roi(img, full) == img);
  const roi::RoiSpec again{"f", {roi::Kind::Altitude, {}}, {0, 0, 3, 2}, std::nullopt};
  CHECK(roi::crop_roi(c, again) == c);
  const roi::RoiSpec outside{"f", {roi::Kind::Altitude, {}}, {4, 3, 3, 2}, std::nullopt};
  CHECK(error_code_of([&] { roi::crop_roi(img, outside); }) == ErrorCode::OutOfBounds);
}

TEST_CASE("enhance_roi output size follows the class constants") {
  std::mt19937 rng(4);
  const auto crop = testing::random_image(rng, 20, 10);
  const auto coord = roi::enhance_roi(crop, {roi::Kind::Latitude, {}}, {});
  CHECK(coord.width() == 300);
  CHECK(coord.height() == 240);
  const auto aux = roi::enhance_roi(crop, {roi::Kind::Battery, {}}, {});
  CHECK(aux.width() == 60);
  CHECK(aux.height() == 40);
  for (const auto& img : {coord, aux})
    CHECK(std::all_of(img.pixels().begin(), img.pixels().end(), [](auto p) { return p == 0 || p == 255; }));
  CHECK(roi::enhance_roi(crop, {roi::Kind::Latitude, {}}, {}) == coord);
  // a 1x1 crop is smaller than the tile grid after padding only when tiny; must not throw
  CHECK_NOTHROW(roi::enhance_roi(GrayImage(1, 1, 9), {roi::Kind::Auxiliary, "x"}, {}));
}

TEST_CASE("enhance_roi gives dark glyphs on white for either polarity") {
  const auto dark_on_light = font::render_text("8", 2, 20, 230, 4);
  const auto light_on_dark = font::render_text("8", 2, 230, 20, 4);
  const auto a = roi::enhance_roi(dark_on_light, {roi::Kind::Altitude, {}}, {});
  const auto b = roi::enhance_roi(light_on_dark, {roi::Kind::Altitude, {}}, {});
  CHECK(a == b);
  CHECK(a.at(0, 0) == 255);
  CHECK(std::count(a.pixels().begin(), a.pixels().end(), 0) > 0);
}

TEST_CASE("render_preview with no ROIs leaves the frame unchanged") {
  std::mt19937 rng(8);
  const auto frame = testing::random_image(rng, 40, 30);
  roi::RoiConfig cfg;
  cfg.frame_width = 40;
  cfg.frame_height = 30;
  CHECK(roi::render_preview(frame, cfg) == RgbImage(frame));
}

TEST_CASE("render_preview alters only the outline and label pixels") {
  const GrayImage frame(120, 80, 50);
  roi::RoiConfig cfg;
  cfg.frame_width = 120;
  cfg.frame_height = 80;
  const roi::Rect rect{30, 25, 40, 20};
  cfg.rois = {{"alt", {roi::Kind::Altitude, {}}, rect, std::nullopt}};
  const auto out = roi::render_preview(frame, cfg);
  const auto label = roi::preview_label_box(cfg.rois[0], 120, 80);
  int min_x = 1000, min_y = 1000, max_x = -1, max_y = -1;
  for (int y = 0; y < 80; ++y)
    for (int x = 0; x < 120; ++x) {
      const auto px = out.at(x, y);
      const bool in_rect = x >= rect.x && x < rect.x + rect.w && y >= rect.y && y < rect.y + rect.h;
      const bool on_outline = in_rect && (x < rect.x + 2 || x >= rect.x + rect.w - 2 || y < rect.y + 2 || y >= rect.y + rect.h - 2);
      const bool in_label = x >= label.x && x < label.x + label.w && y >= label.y && y < label.y + label.h;
      if (on_outline) CHECK(px == roi::kOutlineColor);
      else if (!in_label) CHECK(px == Rgb{50, 50, 50});
      if (px == roi::kOutlineColor) {
        min_x = std::min(min_x, x);
        min_y = std::min(min_y, y);
        max_x = std::max(max_x, x);
        max_y = std::max(max_y, y);
      }
    }
  // corners of the red outline give the rect back
  CHECK(roi::Rect{min_x, min_y, max_x - min_x + 1, max_y - min_y + 1} == rect);
}

TEST_CASE("render_preview full-frame ROI outlines the whole frame") {
  const GrayImage frame(30, 20, 0);
  roi::RoiConfig cfg;
  cfg.frame_width = 30;
  cfg.frame_height = 20;
  cfg.rois = {{"all", {roi::Kind::Auxiliary, "all"}, {0, 0, 30, 20}, std::nullopt}};
  const auto out = roi::render_preview(frame, cfg);
  CHECK(out.at(0, 0) == roi::kOutlineColor);
  CHECK(out.at(29, 19) == roi::kOutlineColor);
  CHECK(out.at(15, 10) == Rgb{0, 0, 0});
}

TEST_CASE("render_preview rejects invalid configs") {
  const GrayImage frame(30, 20, 0);
  roi::RoiConfig cfg;
  cfg.frame_width = 30;
  cfg.frame_height = 20;
  cfg.rois = {{"bad", {roi::Kind::Altitude, {}}, {25, 0, 10, 10}, std::nullopt}};
  CHECK(error_code_of([&] { roi::render_preview(frame, cfg); }) == ErrorCode::ValidationFailed);
  cfg.rois.clear();
  cfg.frame_width = 31;
  CHECK(error_code_of([&] { roi::render_preview(frame, cfg); }) == ErrorCode::ValidationFailed);
}
