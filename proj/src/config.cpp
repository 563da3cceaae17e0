#include "hudtrack/config.hpp"

#include <charconv>
#include <fstream>
#include <set>

#include "hudtrack/error.hpp"
#include "hudtrack/image_io.hpp"

namespace hudtrack::config {
namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) bad(where + " must be an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items())
    if (!ok.count(key)) bad(where + ": unknown key '" + key + "'");
}

template <typename T>
T get(const json& obj, const char* key, const std::string& where) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    bad(where + ": key '" + key + "' missing or of the wrong type");
  }
}

template <typename T>
void get_if(const json& obj, const char* key, const std::string& where, T& out) {
  if (obj.contains(key)) out = get<T>(obj, key, where);
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

json stages_json(const std::vector<imaging::Stage>& stages) {
  json out = json::array();
  for (auto s : stages) out.push_back(imaging::to_string(s));
  return out;
}

}  // namespace

nlohmann::json to_json(const roi::RoiConfig& cfg) {
  json rois = json::array();
  for (const auto& r : cfg.rois) {
    json item = {{"label", r.label},
                 {"kind", roi::to_string(r.kind)},
                 {"rect", {r.rect.x, r.rect.y, r.rect.w, r.rect.h}}};
    item["int_digits"] = r.int_digits ? json(*r.int_digits) : json(nullptr);
    rois.push_back(std::move(item));
  }
  return {{"version", cfg.version}, {"frame_width", cfg.frame_width}, {"frame_height", cfg.frame_height}, {"rois", rois}};
}

roi::RoiConfig roi_config_from_json(const nlohmann::json& doc) {
  check_keys(doc, "roi config", {"version", "frame_width", "frame_height", "rois"});
  roi::RoiConfig cfg;
  cfg.version = get<int>(doc, "version", "roi config");
  cfg.frame_width = get<int>(doc, "frame_width", "roi config");
  cfg.frame_height = get<int>(doc, "frame_height", "roi config");
  if (!doc.contains("rois") || !doc["rois"].is_array()) bad("roi config: 'rois' must be an array");
  std::size_t i = 0;
  for (const auto& item : doc["rois"]) {
    const std::string where = "rois[" + std::to_string(i++) + "]";
    check_keys(item, where, {"label", "kind", "rect", "int_digits"});
    roi::RoiSpec spec;
    spec.label = get<std::string>(item, "label", where);
    try {
      spec.kind = roi::kind_from_string(get<std::string>(item, "kind", where));
    } catch (const Error& e) {
      bad(where + ": " + e.what());
    }
    const auto rect = get<std::vector<int>>(item, "rect", where);
    if (rect.size() != 4) bad(where + ": rect must be [x, y, w, h]");
    spec.rect = {rect[0], rect[1], rect[2], rect[3]};
    if (item.contains("int_digits") && !item["int_digits"].is_null()) spec.int_digits = get<int>(item, "int_digits", where);
    cfg.rois.push_back(std::move(spec));
  }
  return cfg;
}

roi::RoiConfig load_roi_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::IoError, "roi config not found: " + path.string());
  std::ifstream in(path);
  try {
    return roi_config_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

void save_roi_config(const roi::RoiConfig& cfg, const std::filesystem::path& path) {
  write_file_atomic(path, to_json(cfg).dump(2) + "\n");
}

nlohmann::json to_json(const roi::ValidationReport& report) {
  auto list = [](const std::vector<roi::Issue>& issues) {
    json out = json::array();
    for (const auto& i : issues) out.push_back({{"label", i.label}, {"code", roi::to_string(i.code)}, {"message", i.message}});
    return out;
  };
  return {{"ok", report.ok()}, {"errors", list(report.errors)}, {"warnings", list(report.warnings)}};
}

void RunConfig::validate() const {
  if (!(fps > 0.0)) bad("fps must be positive");
  if (duration_s && !(*duration_s >= 0.0)) bad("duration_s must be >= 0");
  if (intervals.empty()) bad("at least one sampling interval is required");
  for (int i : intervals)
    if (i < 1) bad("sampling intervals must be positive integers");
  if (workers < 1) bad("workers must be >= 1");
  if (!(histogram_bin_kmh > 0.0)) bad("histogram_bin_kmh must be positive");
  if (run_id.empty()) bad("run_id must not be empty");
  preprocess.validate();
  recognizer.validate();
  filter.validate();
  if (!std::filesystem::is_directory(frames_dir))
    throw Error(ErrorCode::IoError, "frame directory not found: " + frames_dir.string());
  if (!std::filesystem::exists(roi_config))
    throw Error(ErrorCode::IoError, "roi config not found: " + roi_config.string());
}

nlohmann::json to_json(const RunConfig& c) {
  json filter = {{"median_window", c.filter.median_window},
                 {"mad_multiplier", c.filter.mad_multiplier},
                 {"mad_floor_deg", c.filter.mad_floor_deg},
                 {"buffer_m", c.filter.buffer_m},
                 {"revalidate_rejected", c.filter.revalidate_rejected}};
  filter["utm_zone"] = c.filter.utm_zone ? json(*c.filter.utm_zone) : json(nullptr);
  json constants = {{"earth_radius_m", c.constants.earth_radius_m}, {"meters_per_degree", c.constants.meters_per_degree}};
  constants["utm_zone"] = c.constants.utm_zone ? json(*c.constants.utm_zone) : json(nullptr);
  json recognizer = {{"kind", c.recognizer.kind == ocr::RecognizerKind::External ? "external" : "builtin"},
                     {"command", c.recognizer.command},
                     {"timeout_ms", c.recognizer.timeout_ms},
                     {"confidence_floor", c.recognizer.confidence_floor}};
  json out = {
      {"frames_dir", c.frames_dir.string()},
      {"fps", c.fps},
      {"intervals", c.intervals},
      {"preprocess",
       {{"clahe_clip", c.preprocess.clahe_clip},
        {"clahe_tiles", {c.preprocess.clahe_tiles.cols, c.preprocess.clahe_tiles.rows}},
        {"blur_kernel", c.preprocess.blur_kernel},
        {"threshold_block", c.preprocess.threshold_block},
        {"threshold_bias", c.preprocess.threshold_bias},
        {"stages", stages_json(c.preprocess.stages_enabled)},
        {"roi_coordinate_clip", c.preprocess.roi_coordinate_clip},
        {"roi_auxiliary_clip", c.preprocess.roi_auxiliary_clip}}},
      {"roi_config", c.roi_config.string()},
      {"recognizer", recognizer},
      {"filter", filter},
      {"constants", constants},
      {"exports",
       {{"csv", c.exports.csv},
        {"kmz", c.exports.kmz},
        {"geojson", c.exports.geojson},
        {"charts", c.exports.charts},
        {"extrude", c.exports.extrude},
        {"preprocessed_frames", c.exports.preprocessed_frames}}},
      {"histogram_bin_kmh", c.histogram_bin_kmh},
      {"output_dir", c.output_dir.string()},
      {"run_id", c.run_id},
      {"workers", c.workers},
  };
  out["duration_s"] = c.duration_s ? json(*c.duration_s) : json(nullptr);
  return out;
}

RunConfig run_config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
  check_keys(doc, "run config",
             {"frames_dir", "fps", "duration_s", "intervals", "preprocess", "roi_config", "recognizer", "filter",
              "constants", "exports", "histogram_bin_kmh", "output_dir", "run_id", "workers"});
  RunConfig c;
  const std::string top = "run config";
  if (doc.contains("frames_dir")) c.frames_dir = resolve(base_dir, get<std::string>(doc, "frames_dir", top));
  if (doc.contains("roi_config")) c.roi_config = resolve(base_dir, get<std::string>(doc, "roi_config", top));
  if (doc.contains("output_dir")) c.output_dir = resolve(base_dir, get<std::string>(doc, "output_dir", top));
  else c.output_dir = resolve(base_dir, "out");
  get_if(doc, "fps", top, c.fps);
  if (doc.contains("duration_s") && !doc["duration_s"].is_null()) c.duration_s = get<double>(doc, "duration_s", top);
  get_if(doc, "intervals", top, c.intervals);
  get_if(doc, "histogram_bin_kmh", top, c.histogram_bin_kmh);
  get_if(doc, "run_id", top, c.run_id);
  get_if(doc, "workers", top, c.workers);

  if (doc.contains("preprocess")) {
    const auto& p = doc["preprocess"];
    const std::string where = "preprocess";
    check_keys(p, where,
               {"clahe_clip", "clahe_tiles", "blur_kernel", "threshold_block", "threshold_bias", "stages",
                "roi_coordinate_clip", "roi_auxiliary_clip"});
    get_if(p, "clahe_clip", where, c.preprocess.clahe_clip);
    if (p.contains("clahe_tiles")) {
      const auto t = get<std::vector<int>>(p, "clahe_tiles", where);
      if (t.size() != 2) bad("preprocess: clahe_tiles must be [cols, rows]");
      c.preprocess.clahe_tiles = {t[0], t[1]};
    }
    get_if(p, "blur_kernel", where, c.preprocess.blur_kernel);
    get_if(p, "threshold_block", where, c.preprocess.threshold_block);
    get_if(p, "threshold_bias", where, c.preprocess.threshold_bias);
    get_if(p, "roi_coordinate_clip", where, c.preprocess.roi_coordinate_clip);
    get_if(p, "roi_auxiliary_clip", where, c.preprocess.roi_auxiliary_clip);
    if (p.contains("stages")) {
      c.preprocess.stages_enabled.clear();
      for (const auto& s : get<std::vector<std::string>>(p, "stages", where)) {
        try {
          c.preprocess.stages_enabled.push_back(imaging::stage_from_string(s));
        } catch (const Error& e) {
          bad(std::string("preprocess: ") + e.what());
        }
      }
    }
  }
  if (doc.contains("recognizer")) {
    const auto& r = doc["recognizer"];
    const std::string where = "recognizer";
    check_keys(r, where, {"kind", "command", "timeout_ms", "confidence_floor"});
    if (r.contains("kind")) {
      const auto kind = get<std::string>(r, "kind", where);
      if (kind == "builtin") c.recognizer.kind = ocr::RecognizerKind::Builtin;
      else if (kind == "external") c.recognizer.kind = ocr::RecognizerKind::External;
      else bad("recognizer: kind must be 'builtin' or 'external'");
    }
    get_if(r, "command", where, c.recognizer.command);
    get_if(r, "timeout_ms", where, c.recognizer.timeout_ms);
    get_if(r, "confidence_floor", where, c.recognizer.confidence_floor);
  }
  if (doc.contains("filter")) {
    const auto& f = doc["filter"];
    const std::string where = "filter";
    check_keys(f, where, {"median_window", "mad_multiplier", "mad_floor_deg", "buffer_m", "utm_zone", "revalidate_rejected"});
    get_if(f, "median_window", where, c.filter.median_window);
    get_if(f, "mad_multiplier", where, c.filter.mad_multiplier);
    get_if(f, "mad_floor_deg", where, c.filter.mad_floor_deg);
    get_if(f, "buffer_m", where, c.filter.buffer_m);
    get_if(f, "revalidate_rejected", where, c.filter.revalidate_rejected);
    if (f.contains("utm_zone") && !f["utm_zone"].is_null()) c.filter.utm_zone = get<int>(f, "utm_zone", where);
  }
  if (doc.contains("constants")) {
    const auto& k = doc["constants"];
    const std::string where = "constants";
    check_keys(k, where, {"earth_radius_m", "meters_per_degree", "utm_zone"});
    get_if(k, "earth_radius_m", where, c.constants.earth_radius_m);
    get_if(k, "meters_per_degree", where, c.constants.meters_per_degree);
    if (k.contains("utm_zone") && !k["utm_zone"].is_null()) c.constants.utm_zone = get<int>(k, "utm_zone", where);
  }
  if (doc.contains("exports")) {
    const auto& e = doc["exports"];
    const std::string where = "exports";
    check_keys(e, where, {"csv", "kmz", "geojson", "charts", "extrude", "preprocessed_frames"});
    get_if(e, "csv", where, c.exports.csv);
    get_if(e, "kmz", where, c.exports.kmz);
    get_if(e, "geojson", where, c.exports.geojson);
    get_if(e, "charts", where, c.exports.charts);
    get_if(e, "extrude", where, c.exports.extrude);
    get_if(e, "preprocessed_frames", where, c.exports.preprocessed_frames);
  }
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw Error(ErrorCode::IoError, "run config not found: " + path.string());
  std::ifstream in(path);
  try {
    return run_config_from_json(json::parse(in), path.parent_path());
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ConfigError, path.string() + ": " + e.what());
  }
}

std::vector<int> parse_interval_list(const std::string& text) {
  std::vector<int> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find(',', start), text.size());
    const std::string item = text.substr(start, end - start);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size() || v < 1)
      bad("bad interval '" + item + "' in '" + text + "'");
    out.push_back(v);
    start = end + 1;
  }
  return out;
}

}  // namespace hudtrack::config
