#include <fstream>

#include "helpers.hpp"
#include "hudtrack/config.hpp"

using namespace hudtrack;
using testing::error_code_of;
using nlohmann::json;

namespace {

roi::RoiConfig three_rois() {
  roi::RoiConfig cfg;
  cfg.version = 4;
  cfg.frame_width = 640;
  cfg.frame_height = 360;
  cfg.rois = {{"lat", {roi::Kind::Latitude, {}}, {12, 12, 120, 22}, 2},
              {"lon", {roi::Kind::Longitude, {}}, {12, 40, 132, 22}, 3},
              {"sats", {roi::Kind::Auxiliary, "gps_sats"}, {500, 300, 40, 22}, std::nullopt}};
  return cfg;
}

}  // namespace

TEST_CASE("ROI config JSON round trip") {
  const auto cfg = three_rois();
  const auto doc = config::to_json(cfg);
  CHECK(doc.at("rois")[0].at("rect") == json::array({12, 12, 120, 22}));
  CHECK(doc.at("rois")[2].at("kind") == "aux:gps_sats");
  CHECK(config::roi_config_from_json(doc) == cfg);
  testing::TempDir dir("roicfg");
  config::save_roi_config(cfg, dir / "rois.json");
  CHECK(config::load_roi_config(dir / "rois.json") == cfg);
}

TEST_CASE("ROI config schema errors name the key") {
  auto doc = config::to_json(three_rois());
  doc["colour"] = "red";
  try {
    config::roi_config_from_json(doc);
    FAIL("accepted an unknown key");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
    CHECK(std::string(e.what()).find("colour") != std::string::npos);
  }
  doc = config::to_json(three_rois());
  doc["rois"][0]["rect"] = json::array({1, 2, 3});
  CHECK(error_code_of([&] { config::roi_config_from_json(doc); }) == ErrorCode::ConfigError);
  doc = config::to_json(three_rois());
  doc["rois"][1]["kind"] = "heading";
  CHECK(error_code_of([&] { config::roi_config_from_json(doc); }) == ErrorCode::ConfigError);
  doc = config::to_json(three_rois());
  doc["frame_width"] = "wide";
  CHECK(error_code_of([&] { config::roi_config_from_json(doc); }) == ErrorCode::ConfigError);
}

TEST_CASE("missing ROI config file names the path") {
  try {
    config::load_roi_config("/nonexistent/dir/rois.json");
    FAIL("loaded a missing file");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IoError);
    CHECK(std::string(e.what()).find("/nonexistent/dir/rois.json") != std::string::npos);
  }
}

TEST_CASE("validation report JSON") {
  auto cfg = three_rois();
  cfg.rois[0].rect.w = 0;
  const auto doc = config::to_json(roi::validate_config(cfg));
  CHECK(doc.at("ok") == false);
  CHECK(doc.at("errors")[0].at("label") == "lat");
  CHECK(doc.at("errors")[0].at("code") == roi::to_string(roi::IssueCode::EmptyRect));
  CHECK(doc.at("warnings").is_array());
}

TEST_CASE("run config resolves paths and keeps defaults") {
  testing::TempDir dir("runcfg");
  const json doc = {{"frames_dir", "frames"},
                    {"roi_config", "rois.json"},
                    {"fps", 29.97},
                    {"intervals", {1, 5}},
                    {"filter", {{"buffer_m", 1500.0}, {"utm_zone", 33}}},
                    {"preprocess", {{"clahe_tiles", {4, 4}}, {"stages", {"clahe", "threshold"}}}},
                    {"recognizer", {{"kind", "external"}, {"command", "engine --fast"}}}};
  const auto c = config::run_config_from_json(doc, dir.path());
  CHECK(c.frames_dir == dir / "frames");
  CHECK(c.roi_config == dir / "rois.json");
  CHECK(c.output_dir == dir / "out");
  CHECK(c.fps == 29.97);
  CHECK(c.intervals == std::vector<int>{1, 5});
  CHECK(c.filter.buffer_m == 1500.0);
  CHECK(c.filter.utm_zone == 33);
  CHECK(c.filter.median_window == 5);
  CHECK(c.preprocess.clahe_tiles.cols == 4);
  CHECK(c.preprocess.stages_enabled == std::vector{imaging::Stage::Clahe, imaging::Stage::Threshold});
  CHECK(c.recognizer.kind == ocr::RecognizerKind::External);
  CHECK(c.constants.earth_radius_m == geodesy::kMeanEarthRadius);
  // referenced paths do not exist yet
  CHECK(error_code_of([&] { c.validate(); }) == ErrorCode::IoError);
  std::filesystem::create_directories(dir / "frames");
  config::save_roi_config(three_rois(), dir / "rois.json");
  CHECK_NOTHROW(c.validate());

  const auto again = config::run_config_from_json(config::to_json(c), "/elsewhere");
  CHECK(again.frames_dir == c.frames_dir);
  CHECK(again.intervals == c.intervals);
  CHECK(again.filter.buffer_m == c.filter.buffer_m);
}

TEST_CASE("run config rejects bad values") {
  CHECK(error_code_of([] { config::run_config_from_json({{"speed", 1}}, "/"); }) == ErrorCode::ConfigError);
  CHECK(error_code_of([] { config::run_config_from_json({{"filter", {{"window", 5}}}}, "/"); }) ==
        ErrorCode::ConfigError);
  CHECK(error_code_of([] { config::run_config_from_json({{"preprocess", {{"stages", {"sharpen"}}}}}, "/"); }) ==
        ErrorCode::ConfigError);
  testing::TempDir dir("runbad");
  std::filesystem::create_directories(dir / "frames");
  config::save_roi_config(three_rois(), dir / "rois.json");
  auto c = config::run_config_from_json({{"frames_dir", "frames"}, {"roi_config", "rois.json"}}, dir.path());
  CHECK_NOTHROW(c.validate());
  c.intervals = {0};
  CHECK(error_code_of([&] { c.validate(); }) == ErrorCode::ConfigError);
  c.intervals = {1};
  c.fps = 0;
  CHECK(error_code_of([&] { c.validate(); }) == ErrorCode::ConfigError);
  c.fps = 1;
  c.workers = 0;
  CHECK(error_code_of([&] { c.validate(); }) == ErrorCode::ConfigError);
}

TEST_CASE("interval lists") {
  CHECK(config::parse_interval_list("1,5,10") == std::vector<int>{1, 5, 10});
  CHECK(config::parse_interval_list("20") == std::vector<int>{20});
  for (const char* bad : {"", "1,,5", "a", "0", "-5", "1.5"})
    CHECK_MESSAGE(error_code_of([&] { config::parse_interval_list(bad); }) == ErrorCode::ConfigError, bad);
}
