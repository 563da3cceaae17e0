#include "hudtrack/export.hpp"

#include <charconv>
#include <cmath>
#include <vector>

#include "hudtrack/error.hpp"
#include "hudtrack/image_io.hpp"
#include "hudtrack/zip.hpp"

namespace hudtrack::exporter {
namespace {

using nlohmann::json;

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto end = line.find(sep, start);
    if (end == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, end - start));
    start = end + 1;
  }
}

double parse_double(std::string_view text, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw Error(ErrorCode::DecodeError,
                "csv line " + std::to_string(line_no) + ": bad number '" + std::string(text) + "'");
  return v;
}

std::optional<double> parse_optional(std::string_view text, std::size_t line_no) {
  if (text.empty()) return std::nullopt;
  return parse_double(text, line_no);
}

std::string optional_fixed(const std::optional<double>& v, int decimals) {
  return v ? format_fixed(*v, decimals) : std::string{};
}

std::string xml_escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string format_fixed(double value, int decimals) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, decimals);
  if (ec != std::errc{}) throw Error(ErrorCode::IoError, "number too large to format");
  std::string out(buf, ptr);
  // "-0.0" reads oddly in a table
  if (out.front() == '-' && out.find_first_not_of("-0.") == std::string::npos) out.erase(0, 1);
  return out;
}

std::string format_shortest(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw Error(ErrorCode::IoError, "number too large to format");
  return std::string(buf, ptr);
}

std::string track_to_csv(const FlightTrack& track) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : track.records) {
    out += format_shortest(r.t);
    out += ',' + std::to_string(r.frame_index);
    out += ',' + format_fixed(r.lat, 6);
    out += ',' + format_fixed(r.lon, 6);
    out += ',' + optional_fixed(r.altitude, 1);
    out += ',' + optional_fixed(r.airspeed, 1);
    out += ',' + optional_fixed(r.vspeed, 1);
    out += ',';
    if (r.battery) out += format_fixed(r.battery->value, 1) + (r.battery->unit == ocr::Unit::Volts ? "V" : "%");
    out += ',' + optional_fixed(r.capacity_used, 1);
    out += ',' + format_status(r.field_status);
    out += '\n';
  }
  return out;
}

FlightTrack track_from_csv(std::string_view text) {
  FlightTrack track;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!header_seen) {
      if (line != kCsvHeader) throw Error(ErrorCode::DecodeError, "csv: unexpected header '" + std::string(line) + "'");
      header_seen = true;
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != 10)
      throw Error(ErrorCode::DecodeError, "csv line " + std::to_string(line_no) + ": expected 10 columns");
    TelemetryRecord r;
    r.t = parse_double(cells[0], line_no);
    r.frame_index = static_cast<int>(parse_double(cells[1], line_no));
    r.lat = parse_double(cells[2], line_no);
    r.lon = parse_double(cells[3], line_no);
    r.altitude = parse_optional(cells[4], line_no);
    r.airspeed = parse_optional(cells[5], line_no);
    r.vspeed = parse_optional(cells[6], line_no);
    if (!cells[7].empty()) {
      const char unit = cells[7].back();
      if (unit != '%' && unit != 'V')
        throw Error(ErrorCode::DecodeError, "csv line " + std::to_string(line_no) + ": battery needs % or V");
      r.battery = BatteryLevel{parse_double(cells[7].substr(0, cells[7].size() - 1), line_no),
                               unit == 'V' ? ocr::Unit::Volts : ocr::Unit::Percent};
    }
    r.capacity_used = parse_optional(cells[8], line_no);
    try {
      r.field_status = parse_status(std::string(cells[9]));
    } catch (const Error& e) {
      throw Error(ErrorCode::DecodeError, "csv line " + std::to_string(line_no) + ": " + e.what());
    }
    track.records.push_back(std::move(r));
  }
  if (!header_seen) throw Error(ErrorCode::DecodeError, "csv: missing header");
  return track;
}

void write_track_csv(const FlightTrack& track, const std::filesystem::path& path) {
  if (track.empty()) throw Error(ErrorCode::EmptyTrack, "refusing to write an empty track to " + path.string());
  write_file_atomic(path, track_to_csv(track));
}

FlightTrack read_track_csv(const std::filesystem::path& path) {
  const auto bytes = read_file_bytes(path);
  try {
    return track_from_csv(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.what());
  }
}

std::string track_to_kml(const FlightTrack& track, const KmlOptions& options) {
  if (track.size() < 2) throw Error(ErrorCode::TooShort, "a flight path needs at least two points");
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<kml xmlns=\"http://www.opengis.net/kml/2.2\">\n";
  out += "<Document>\n";
  out += "  <name>" + xml_escape(options.run_id) + "</name>\n";
  out += "  <Style id=\"track\"><LineStyle><color>ff0000ff</color><width>3</width></LineStyle></Style>\n";
  out += "  <Placemark>\n";
  out += "    <name>flight path</name>\n";
  out += "    <styleUrl>#track</styleUrl>\n";
  out += "    <LineString>\n";
  if (options.extrude) out += "      <extrude>1</extrude>\n";
  out += "      <altitudeMode>absolute</altitudeMode>\n";
  out += "      <coordinates>\n";
  for (const auto& r : track.records) {
    out += "        " + format_fixed(r.lon, 6) + ',' + format_fixed(r.lat, 6) + ',' +
           format_fixed(r.altitude.value_or(0.0), 1) + '\n';
  }
  out += "      </coordinates>\n";
  out += "    </LineString>\n";
  out += "  </Placemark>\n";
  out += "</Document>\n";
  out += "</kml>\n";
  return out;
}

void write_kmz(const FlightTrack& track, const std::filesystem::path& path, const KmlOptions& options) {
  const auto kml = track_to_kml(track, options);
  const zip::Entry entry{"doc.kml", std::vector<std::uint8_t>(kml.begin(), kml.end())};
  write_file_atomic(path, zip::write_archive(std::span(&entry, 1)));
}

nlohmann::json track_to_geojson(const FlightTrack& track) {
  if (track.empty()) throw Error(ErrorCode::EmptyTrack, "nothing to export");
  json line = json::array();
  json features = json::array();
  for (const auto& r : track.records) {
    json pos = json::array({r.lon, r.lat});
    if (r.altitude) pos.push_back(*r.altitude);
    line.push_back(pos);
  }
  features.push_back({{"type", "Feature"},
                      {"geometry", {{"type", "LineString"}, {"coordinates", line}}},
                      {"properties", {{"name", "flight path"}, {"points", track.size()}}}});
  for (const auto& r : track.records) {
    json pos = json::array({r.lon, r.lat});
    if (r.altitude) pos.push_back(*r.altitude);
    json props = {{"t_s", r.t},
                  {"frame", r.frame_index},
                  {"alt_m", optional_json(r.altitude)},
                  {"airspeed_kmh", optional_json(r.airspeed)},
                  {"vspeed_ms", optional_json(r.vspeed)},
                  {"capacity_mah", optional_json(r.capacity_used)},
                  {"status", format_status(r.field_status)}};
    if (r.battery)
      props["battery"] = {{"value", r.battery->value}, {"unit", ocr::to_string(r.battery->unit)}};
    else
      props["battery"] = nullptr;
    features.push_back({{"type", "Feature"}, {"geometry", {{"type", "Point"}, {"coordinates", pos}}}, {"properties", props}});
  }
  return {{"type", "FeatureCollection"}, {"features", features}};
}

void write_geojson(const FlightTrack& track, const std::filesystem::path& path) {
  write_json(path, track_to_geojson(track));
}

nlohmann::json to_json(const analysis::SamplingReport& report) {
  json intervals = json::array();
  for (const auto& r : report.intervals) {
    json speeds = json::array();
    for (const auto& s : r.speeds)
      speeds.push_back({{"method", s.method},
                        {"distance_km", s.distance_km},
                        {"mean_kmh", s.mean},
                        {"max_kmh", s.max},
                        {"sigma_kmh", s.sigma},
                        {"overall_kmh", s.overall}});
    json item = {{"interval_s", r.interval_s},
                 {"raw_count", r.raw_count},
                 {"clean_count", r.clean_count},
                 {"retention_pct", r.retention.retention_pct},
                 {"removal_pct", r.retention.removal_pct},
                 {"reduction_vs_baseline_pct", r.reduction_vs_baseline_pct},
                 {"mean_spacing_m", optional_json(r.mean_spacing_m)},
                 {"raw_path_length_m", optional_json(r.raw_path_length_m)},
                 {"clean_path_length_m", optional_json(r.clean_path_length_m)},
                 {"speeds", speeds}};
    if (r.speed_histogram)
      item["speed_histogram"] = {{"bin_width_kmh", r.speed_histogram->bin_width},
                                 {"counts", r.speed_histogram->counts}};
    else
      item["speed_histogram"] = nullptr;
    if (r.altitude)
      item["altitude"] = {{"peak_m", r.altitude->peak},
                          {"mean_m", r.altitude->mean},
                          {"sigma_over_mean_pct", r.altitude->sigma_over_mean_pct},
                          {"samples", r.altitude->samples},
                          {"missing", r.altitude->missing}};
    else
      item["altitude"] = nullptr;
    if (r.rmse_vs_baseline)
      item["rmse_vs_baseline"] = {{"rmse_kmh", r.rmse_vs_baseline->rmse},
                                  {"sigma_kmh", r.rmse_vs_baseline->sigma},
                                  {"aligned", r.rmse_vs_baseline->aligned}};
    else
      item["rmse_vs_baseline"] = nullptr;
    intervals.push_back(std::move(item));
  }
  return {{"baseline_interval_s", report.baseline_interval},
          {"constants",
           {{"earth_radius_m", report.constants.earth_radius_m},
            {"meters_per_degree", report.constants.meters_per_degree},
            {"utm_zone", report.constants.utm_zone ? json(*report.constants.utm_zone) : json("auto")}}},
          {"intervals", intervals}};
}

nlohmann::json to_json(const analysis::MethodReport& report) {
  json methods = json::array();
  for (const auto& m : report.methods)
    methods.push_back({{"method", m.method},
                       {"distance_km", m.distance_km},
                       {"mean_speed_kmh", m.mean_speed_kmh},
                       {"max_speed_kmh", m.max_speed_kmh},
                       {"sigma_speed_kmh", m.sigma_speed_kmh},
                       {"overall_speed_kmh", m.overall_speed_kmh}});
  return {{"interval_s", report.interval_s},
          {"points", report.points},
          {"methods", methods},
          {"rmse_kmh", report.rmse},
          {"distance_pct_vs_utm", report.distance_pct_vs_utm},
          {"mean_speed_pct_vs_utm", report.mean_speed_pct_vs_utm}};
}

nlohmann::json to_json(std::span<const trajectory::DropEntry> dropped) {
  json out = json::array();
  for (const auto& d : dropped) out.push_back({{"frame", d.frame_index}, {"t_s", d.t}, {"reason", d.reason}});
  return out;
}

nlohmann::json to_json(const trajectory::TwoStageResult& result) {
  json removed = json::array();
  for (const auto& [rec, stage] : result.removed)
    removed.push_back({{"frame", rec.frame_index}, {"t_s", rec.t}, {"lat", rec.lat}, {"lon", rec.lon}, {"stage", stage}});
  return {{"stage1_removed", result.stage1.removed.size()},
          {"stage2_removed", result.stage2.removed.size()},
          {"clean_count", result.clean.size()},
          {"removed", removed}};
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
  write_file_atomic(path, doc.dump(2) + "\n");
}

void write_charts(const ChartSet& charts, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "counts.svg", charts.counts_svg);
  write_file_atomic(dir / "speeds.svg", charts.speeds_svg);
  write_file_atomic(dir / "methods.svg", charts.methods_svg);
}

}  // namespace hudtrack::exporter
