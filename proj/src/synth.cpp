#include "hudtrack/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "hudtrack/config.hpp"
#include "hudtrack/error.hpp"
#include "hudtrack/export.hpp"
#include "hudtrack/font.hpp"
#include "hudtrack/image_io.hpp"
#include "hudtrack/ingest.hpp"
#include "hudtrack/trajectory.hpp"

namespace hudtrack::synth {

void FlightSimParams::validate() const {
  if (duration_s < 2) throw Error(ErrorCode::ConfigError, "flight duration must be >= 2 s");
  if (!(speed_min_kmh >= 0.0 && speed_min_kmh <= speed_max_kmh && speed_max_kmh <= 500.0))
    throw Error(ErrorCode::ConfigError, "speed bounds must satisfy 0 <= min <= max <= 500 km/h");
  if (!(altitude_min_m >= -500.0 && altitude_min_m <= altitude_max_m && altitude_max_m <= 10000.0))
    throw Error(ErrorCode::ConfigError, "altitude bounds must satisfy -500 <= min <= max <= 10000 m");
  if (!(heading_volatility_deg_s >= 0.0)) throw Error(ErrorCode::ConfigError, "heading volatility must be >= 0");
  if (!(std::abs(start.lat) < 85.0 && std::abs(start.lon) <= 180.0))
    throw Error(ErrorCode::ConfigError, "start point outside the supported range");
}

FlightTrack simulate_flight(const FlightSimParams& p) {
  p.validate();
  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  const int n = p.duration_s + 1;
  double heading = p.initial_heading_deg ? *p.initial_heading_deg : 360.0 * uni(rng);
  double speed = p.speed_min_kmh + (p.speed_max_kmh - p.speed_min_kmh) * uni(rng);
  const double speed_step = std::max(0.5, 0.05 * (p.speed_max_kmh - p.speed_min_kmh));

  // Altitude: a slow sinusoid inside the bounds, sampled at whole metres/10.
  const double alt_mid = 0.5 * (p.altitude_min_m + p.altitude_max_m);
  const double alt_amp = 0.5 * (p.altitude_max_m - p.altitude_min_m);
  const double period = 60.0 + 120.0 * uni(rng);
  const double phase = 2.0 * std::numbers::pi * uni(rng);

  FlightTrack track;
  geodesy::GeoPoint pos = p.start;
  std::vector<double> speeds;
  for (int i = 0; i < n; ++i) {
    TelemetryRecord r;
    r.t = i;
    r.frame_index = i;
    r.lat = pos.lat;
    r.lon = pos.lon;
    r.altitude = std::round(10.0 * (alt_mid + alt_amp * std::sin(2.0 * std::numbers::pi * i / period + phase))) / 10.0;
    r.battery = BatteryLevel{std::round(100.0 - 30.0 * i / std::max(1, p.duration_s)), ocr::Unit::Percent};
    r.capacity_used = std::round(12.5 * i);
    track.records.push_back(r);

    speeds.push_back(speed);
    pos = geodesy::destination(pos, heading, speed / 3.6);
    heading = std::fmod(heading + p.heading_volatility_deg_s * gauss(rng) + 360.0, 360.0);
    speed = std::clamp(speed + speed_step * gauss(rng), p.speed_min_kmh, p.speed_max_kmh);
  }
  for (int i = 0; i < n; ++i) {
    auto& r = track.records[static_cast<std::size_t>(i)];
    // airspeed of the segment leaving this record; the last one repeats
    r.airspeed = speeds[static_cast<std::size_t>(std::min(i, n - 2))];
    if (i + 1 < n)
      r.vspeed = *track.records[static_cast<std::size_t>(i) + 1].altitude - *r.altitude;
    else
      r.vspeed = track.records[static_cast<std::size_t>(i) - 1].vspeed;
  }
  return track;
}

HudStyle default_style(int lon_int_digits) {
  HudStyle s;
  const int lon_chars = lon_int_digits + 8;  // sign, point, six decimals
  s.layout = {
      {"lat", {roi::Kind::Latitude, {}}, 16, 16, 10, 2},
      {"lon", {roi::Kind::Longitude, {}}, 16, 44, lon_chars, lon_int_digits},
      {"battery", {roi::Kind::Battery, {}}, 540, 16, 4, {}},
      {"capacity", {roi::Kind::CapacityUsed, {}}, 540, 44, 6, {}},
      {"alt", {roi::Kind::Altitude, {}}, 16, 300, 7, {}},
      {"speed", {roi::Kind::AirSpeed, {}}, 16, 328, 8, {}},
      {"vspeed", {roi::Kind::VerticalSpeed, {}}, 200, 328, 6, {}},
  };
  return s;
}

void HudStyle::validate() const {
  if (width < 1 || height < 1) throw Error(ErrorCode::LayoutError, "frame dimensions must be positive");
  if (scale < 1) throw Error(ErrorCode::LayoutError, "font scale must be >= 1");
  if (foreground == background) throw Error(ErrorCode::LayoutError, "foreground equals background");
  for (const auto& a : layout) {
    const int w = font::text_width(std::string(static_cast<std::size_t>(a.max_chars), '0'), scale);
    if (a.x - margin < 0 || a.y - margin < 0 || a.x + w + margin > width ||
        a.y + font::text_height(scale) + margin > height)
      throw Error(ErrorCode::LayoutError, "field '" + a.label + "' does not fit in the frame");
  }
}

std::string display_text(const TelemetryRecord& rec, const roi::RoiKind& kind) {
  switch (kind.kind) {
    case roi::Kind::Latitude: return exporter::format_fixed(rec.lat, 6);
    case roi::Kind::Longitude: return exporter::format_fixed(rec.lon, 6);
    case roi::Kind::Altitude:
      return rec.altitude ? std::to_string(std::llround(*rec.altitude)) + "m" : std::string{};
    case roi::Kind::AirSpeed:
      return rec.airspeed ? std::to_string(std::llround(*rec.airspeed)) + "km/h" : std::string{};
    case roi::Kind::VerticalSpeed: return rec.vspeed ? exporter::format_fixed(*rec.vspeed, 1) : std::string{};
    case roi::Kind::Battery:
      if (!rec.battery) return {};
      if (rec.battery->unit == ocr::Unit::Volts) return exporter::format_fixed(rec.battery->value, 1) + "V";
      return std::to_string(std::llround(rec.battery->value)) + "%";
    case roi::Kind::CapacityUsed:
      return rec.capacity_used ? std::to_string(std::llround(*rec.capacity_used)) : std::string{};
    case roi::Kind::Auxiliary: return {};
  }
  return {};
}

RenderedHud render_hud(const TelemetryRecord& rec, const HudStyle& style) {
  style.validate();
  RenderedHud out{GrayImage(style.width, style.height, style.background), {}};
  out.rois.frame_width = style.width;
  out.rois.frame_height = style.height;
  for (const auto& a : style.layout) {
    const std::string text = display_text(rec, a.kind);
    if (text.empty()) continue;
    if (static_cast<int>(text.size()) > a.max_chars)
      throw Error(ErrorCode::LayoutError, "'" + text + "' overflows the " + a.label + " field");
    font::draw_text(out.frame, a.x, a.y, text, style.scale, style.foreground);
    out.rois.rois.push_back({a.label, a.kind,
                             {a.x - style.margin, a.y - style.margin, font::text_width(text, style.scale) + 2 * style.margin,
                              font::text_height(style.scale) + 2 * style.margin},
                             a.int_digits});
  }
  return out;
}

roi::RoiConfig layout_config(const HudStyle& style) {
  style.validate();
  roi::RoiConfig cfg;
  cfg.frame_width = style.width;
  cfg.frame_height = style.height;
  for (const auto& a : style.layout) {
    const int w = font::text_width(std::string(static_cast<std::size_t>(a.max_chars), '0'), style.scale);
    cfg.rois.push_back({a.label, a.kind,
                        {a.x - style.margin, a.y - style.margin, w + 2 * style.margin,
                         font::text_height(style.scale) + 2 * style.margin},
                        a.int_digits});
  }
  return cfg;
}

GrayImage corrupt(const GrayImage& img, double sigma, double contrast, std::uint64_t seed) {
  if (!(sigma >= 0.0) || !(contrast > 0.0))
    throw Error(ErrorCode::ConfigError, "corruption needs sigma >= 0 and contrast > 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, sigma > 0.0 ? sigma : 1.0);
  GrayImage out = img;
  for (auto& px : out.pixels()) {
    const double noise = sigma > 0.0 ? gauss(rng) : 0.0;
    const double v = (static_cast<double>(px) - 128.0) * contrast + 128.0 + noise;
    px = static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
  }
  return out;
}

std::vector<std::size_t> inject_coordinate_outliers(FlightTrack& track, int count, double min_m, double max_m,
                                                    double clearance_m, std::uint64_t seed) {
  if (count < 0 || static_cast<std::size_t>(count) > track.size())
    throw Error(ErrorCode::ConfigError, "cannot corrupt more records than the track holds");
  if (!(min_m > 0.0 && min_m <= max_m)) throw Error(ErrorCode::ConfigError, "bad displacement range");
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(track.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  order.resize(static_cast<std::size_t>(count));
  std::sort(order.begin(), order.end());

  const auto pts = track.points();
  const int zone = geodesy::auto_zone(pts);
  std::vector<trajectory::Point2> line;
  for (const auto& p : pts) {
    const auto pp = geodesy::utm_forward(p, zone);
    line.push_back({pp.easting, pp.hemisphere == geodesy::Hemisphere::South ? pp.northing - 1e7 : pp.northing});
  }
  std::uniform_real_distribution<double> dist(min_m, max_m);
  std::uniform_real_distribution<double> bearing(0.0, 360.0);
  for (std::size_t idx : order) {
    auto& r = track.records[idx];
    for (int attempt = 0;; ++attempt) {
      if (attempt == 10000) throw Error(ErrorCode::ConfigError, "no displacement clears the track");
      const auto moved = geodesy::destination(r.point(), bearing(rng), dist(rng));
      const auto pp = geodesy::utm_forward(moved, zone);
      const trajectory::Point2 q{pp.easting,
                                 pp.hemisphere == geodesy::Hemisphere::South ? pp.northing - 1e7 : pp.northing};
      if (trajectory::point_to_polyline_distance(q, line) > clearance_m) {
        r.lat = moved.lat;
        r.lon = moved.lon;
        break;
      }
    }
  }
  return order;
}

Dataset write_dataset(const DatasetSpec& spec, const std::filesystem::path& dir) {
  Dataset ds;
  ds.truth = simulate_flight(spec.flight);
  spec.style.validate();
  ds.rois = layout_config(spec.style);
  const auto frames = dir / "frames";
  std::filesystem::create_directories(frames);
  for (const auto& r : ds.truth.records) {
    GrayImage img = render_hud(r, spec.style).frame;
    if (spec.noise_sigma > 0.0 || spec.contrast != 1.0)
      img = corrupt(img, spec.noise_sigma, spec.contrast, spec.noise_seed * 1000003ULL + static_cast<std::uint64_t>(r.frame_index));
    const auto bytes = spec.extension == ".pgm" ? encode_pgm(img) : encode_png(img);
    write_file_atomic(frames / ingest::frame_filename(r.frame_index, spec.extension), bytes);
  }
  exporter::write_track_csv(ds.truth, dir / "truth.csv");
  config::save_roi_config(ds.rois, dir / "rois.json");

  config::RunConfig run;
  run.frames_dir = "frames";
  run.fps = 1.0;
  run.roi_config = "rois.json";
  run.output_dir = "out";
  run.run_id = "synth-" + std::to_string(spec.flight.seed);
  exporter::write_json(dir / "run.json", config::to_json(run));
  return ds;
}

}  // namespace hudtrack::synth
