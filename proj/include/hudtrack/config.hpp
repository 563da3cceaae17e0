#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hudtrack/external_recognizer.hpp"
#include "hudtrack/geodesy.hpp"
#include "hudtrack/imaging.hpp"
#include "hudtrack/roi.hpp"
#include "hudtrack/trajectory.hpp"

namespace hudtrack::config {

/// {"version", "frame_width", "frame_height",
///  "rois": [{"label", "kind", "rect": [x, y, w, h], "int_digits"}]}
nlohmann::json to_json(const roi::RoiConfig& cfg);

/// Throws Error{ConfigError} naming the offending key.
roi::RoiConfig roi_config_from_json(const nlohmann::json& doc);

/// Throws Error{IoError} (with the path) when the file is missing.
roi::RoiConfig load_roi_config(const std::filesystem::path& path);
void save_roi_config(const roi::RoiConfig& cfg, const std::filesystem::path& path);

nlohmann::json to_json(const roi::ValidationReport& report);

struct ExportSelection {
  bool csv = true;
  bool kmz = true;
  bool geojson = true;
  bool charts = true;
  bool extrude = true;
  /// Writes each sampled frame after the frame-level stages.
  bool preprocessed_frames = false;
};

struct RunConfig {
  std::filesystem::path frames_dir;
  double fps = 1.0;
  std::optional<double> duration_s;
  std::vector<int> intervals{1, 5, 10, 15, 20};
  imaging::PreprocessParams preprocess;
  std::filesystem::path roi_config;
  ocr::RecognizerSpec recognizer;
  trajectory::FilterParams filter;
  geodesy::MethodConstants constants;
  ExportSelection exports;
  double histogram_bin_kmh = 5.0;
  std::filesystem::path output_dir = "out";
  std::string run_id = "run";
  int workers = 1;

  /// Throws Error{ConfigError}; missing referenced paths throw Error{IoError}.
  void validate() const;
};

nlohmann::json to_json(const RunConfig& cfg);

/// Relative paths resolve against `base_dir`. Unknown keys are rejected.
RunConfig run_config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

/// "1,5,10" -> {1, 5, 10}. Throws Error{ConfigError}.
std::vector<int> parse_interval_list(const std::string& text);

}  // namespace hudtrack::config
