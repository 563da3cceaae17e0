#include "hudtrack/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace hudtrack::trajectory {

namespace {

// Largest set of mutually shielding vertices the buffer stage bridges out.
constexpr std::size_t kMaxShieldGroup = 12;

double median_of(std::vector<double> v) {
  const std::size_t n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (n % 2 == 1) return *mid;
  return (*mid + *std::max_element(v.begin(), mid)) / 2.0;
}

struct Interpreted {
  std::optional<ocr::ParsedValue> value;
  std::string code;
};

Interpreted interpret(const FieldReading& f, double floor) {
  if (f.engine_error) return {std::nullopt, std::string(to_string(*f.engine_error))};
  if (f.reading.empty()) return {std::nullopt, "NoGlyphs"};
  if (f.reading.confidence < floor) return {std::nullopt, "Unreadable"};
  const auto outcome = ocr::parse_value(f.kind, f.reading.raw_text, f.int_digits);
  if (!outcome.ok()) return {std::nullopt, std::string(to_string(outcome.error))};
  return {outcome.value, {}};
}

FilterResult split(const FlightTrack& track, const std::vector<bool>& keep) {
  FilterResult out;
  out.clean.crs = track.crs;
  for (std::size_t i = 0; i < track.records.size(); ++i) {
    if (keep[i]) {
      out.clean.records.push_back(track.records[i]);
    } else {
      out.removed.push_back(track.records[i]);
      out.removed_indices.push_back(i);
    }
  }
  return out;
}

double point_segment_distance(Point2 p, Point2 a, Point2 b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(((p.x - a.x) * dx + (p.y - a.y) * dy) / len2, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

Point2 project(const TelemetryRecord& r, int zone) {
  const auto pp = geodesy::utm_forward(r.point(), zone);
  const double northing = pp.hemisphere == geodesy::Hemisphere::South ? pp.northing - 1e7 : pp.northing;
  return {pp.easting, northing};
}

}  // namespace

AssembledTrack assemble_track(std::span<const FrameReadings> frames, const ingest::SamplingPlan& plan,
                              double confidence_floor) {
  std::map<int, double> time_of;
  for (std::size_t i = 0; i < plan.frame_indices.size(); ++i)
    time_of.emplace(plan.frame_indices[i], plan.frame_times[i]);

  AssembledTrack out;
  std::set<int> seen;
  for (const auto& frame : frames) {
    const auto tit = time_of.find(frame.frame_index);
    const double t = tit == time_of.end() ? -1.0 : tit->second;
    if (tit == time_of.end()) {
      out.dropped.push_back({frame.frame_index, t, "NotInPlan"});
      continue;
    }
    if (!seen.insert(frame.frame_index).second) {
      out.dropped.push_back({frame.frame_index, t, "DuplicateFrame"});
      continue;
    }

    TelemetryRecord rec;
    rec.t = t;
    rec.frame_index = frame.frame_index;
    std::optional<double> lat, lon;
    for (const auto& field : frame.fields) {
      if (field.kind.kind == roi::Kind::Auxiliary) continue;
      const auto res = interpret(field, confidence_floor);
      if (!res.value) {
        rec.field_status.push_back({roi::to_string(field.kind), res.code});
        continue;
      }
      const double v = res.value->value;
      switch (field.kind.kind) {
        case roi::Kind::Latitude: lat = v; break;
        case roi::Kind::Longitude: lon = v; break;
        case roi::Kind::Altitude: rec.altitude = v; break;
        case roi::Kind::AirSpeed: rec.airspeed = v; break;
        case roi::Kind::VerticalSpeed: rec.vspeed = v; break;
        case roi::Kind::Battery: rec.battery = BatteryLevel{v, res.value->unit}; break;
        case roi::Kind::CapacityUsed: rec.capacity_used = v; break;
        case roi::Kind::Auxiliary: break;
      }
    }
    if (!lat || !lon) {
      std::string reason = format_status(rec.field_status);
      if (!lat && !lon && reason == "ok") reason = "no coordinate ROIs";
      out.dropped.push_back({frame.frame_index, t, reason});
      continue;
    }
    rec.lat = *lat;
    rec.lon = *lon;
    out.track.records.push_back(std::move(rec));
  }
  std::sort(out.track.records.begin(), out.track.records.end(),
            [](const TelemetryRecord& a, const TelemetryRecord& b) { return a.t < b.t; });
  if (out.track.empty()) throw Error(ErrorCode::EmptyTrack, "no frame produced both coordinates");
  return out;
}

void FilterParams::validate() const {
  if (median_window < 3 || median_window % 2 == 0)
    throw Error(ErrorCode::ConfigError, "median_window must be odd and >= 3");
  if (!(mad_multiplier > 0.0)) throw Error(ErrorCode::ConfigError, "mad_multiplier must be positive");
  if (!(mad_floor_deg >= 0.0)) throw Error(ErrorCode::ConfigError, "mad_floor must be non-negative");
  if (!(buffer_m > 0.0)) throw Error(ErrorCode::ConfigError, "buffer_m must be positive");
  if (utm_zone && (*utm_zone < 1 || *utm_zone > 60))
    throw Error(ErrorCode::ConfigError, "utm zone must lie in [1,60]");
}

FilterResult median_outlier_filter(const FlightTrack& track, const FilterParams& p) {
  const std::size_t n = track.records.size();
  const std::size_t half = static_cast<std::size_t>(p.median_window / 2);
  std::vector<bool> keep(n, true);

  auto flagged = [&](std::size_t i, auto coord) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n - 1, i + half);
    std::vector<double> window;
    for (std::size_t j = lo; j <= hi; ++j) window.push_back(coord(track.records[j]));
    const double med = median_of(window);
    std::vector<double> dev;
    for (double v : window) dev.push_back(std::abs(v - med));
    const double mad = median_of(dev);
    return std::abs(coord(track.records[i]) - med) > std::max(p.mad_multiplier * mad, p.mad_floor_deg);
  };

  for (std::size_t i = 0; i < n; ++i) {
    const bool out = flagged(i, [](const TelemetryRecord& r) { return r.lat; }) ||
                     flagged(i, [](const TelemetryRecord& r) { return r.lon; });
    keep[i] = !out;
  }
  return split(track, keep);
}

double point_to_polyline_distance(Point2 pt, std::span<const Point2> polyline) {
  if (polyline.empty()) throw Error(ErrorCode::TooShort, "polyline has no points");
  if (polyline.size() == 1) return std::hypot(pt.x - polyline[0].x, pt.y - polyline[0].y);
  double best = INFINITY;
  for (std::size_t i = 1; i < polyline.size(); ++i)
    best = std::min(best, point_segment_distance(pt, polyline[i - 1], polyline[i]));
  return best;
}

FilterResult utm_buffer_filter(const FlightTrack& track, const FlightTrack& baseline, const FilterParams& p) {
  const std::size_t n = track.records.size();
  std::vector<bool> keep(n, true);
  if (n == 0 || baseline.empty()) return split(track, keep);

  const auto base_pts = baseline.points();
  const int zone = p.utm_zone ? *p.utm_zone : geodesy::auto_zone(base_pts);
  std::vector<Point2> base_xy, cand_xy;
  for (const auto& r : baseline.records) base_xy.push_back(project(r, zone));
  for (const auto& r : track.records) cand_xy.push_back(project(r, zone));

  std::map<std::pair<int, double>, std::size_t> base_index;
  for (std::size_t j = 0; j < baseline.records.size(); ++j)
    base_index.emplace(std::make_pair(baseline.records[j].frame_index, baseline.records[j].t), j);
  std::vector<std::ptrdiff_t> self(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto it = base_index.find({track.records[i].frame_index, track.records[i].t});
    if (it != base_index.end()) self[i] = static_cast<std::ptrdiff_t>(it->second);
  }

  std::vector<bool> base_alive(base_xy.size(), true);
  std::vector<std::ptrdiff_t> owner(base_xy.size(), -1);
  for (std::size_t i = 0; i < n; ++i)
    if (self[i] >= 0) owner[static_cast<std::size_t>(self[i])] = static_cast<std::ptrdiff_t>(i);

  // Nearest segment of the live baseline with the vertices in `skip`
  // bridged out. Returns the distance and the segment's vertex indices.
  struct Nearest {
    double d = 0.0;
    std::size_t a = 0, b = 0;
  };
  std::vector<std::size_t> line;
  auto nearest = [&](Point2 q, const std::vector<std::size_t>& skip) {
    line.clear();
    for (std::size_t j = 0; j < base_xy.size(); ++j)
      if (base_alive[j] && std::find(skip.begin(), skip.end(), j) == skip.end()) line.push_back(j);
    Nearest out;
    if (line.empty()) return out;
    out.a = out.b = line[0];
    out.d = std::hypot(q.x - base_xy[line[0]].x, q.y - base_xy[line[0]].y);
    for (std::size_t k = 1; k < line.size(); ++k) {
      const double d = point_segment_distance(q, base_xy[line[k - 1]], base_xy[line[k]]);
      if (d < out.d) out = {d, line[k - 1], line[k]};
    }
    return out;
  };
  auto live_owner = [&](std::size_t j) {
    return owner[j] >= 0 && keep[static_cast<std::size_t>(owner[j])];
  };
  std::vector<Nearest> cached(n);
  auto refresh = [&](std::size_t i) {
    std::vector<std::size_t> skip;
    if (self[i] >= 0) skip.push_back(static_cast<std::size_t>(self[i]));
    cached[i] = nearest(cand_xy[i], skip);
  };
  for (std::size_t i = 0; i < n; ++i) refresh(i);
  // Dropping a vertex only moves the nearest segment of candidates that
  // touched it, while bridging it can pull the line closer to any point.
  auto drop = [&](std::size_t i) {
    keep[i] = false;
    if (self[i] < 0) return;
    const auto v = static_cast<std::size_t>(self[i]);
    base_alive[v] = false;
    for (std::size_t c = 0; c < n; ++c)
      if (keep[c] && (cached[c].a == v || cached[c].b == v || cached[c].d > p.buffer_m)) refresh(c);
  };

  for (;;) {
    std::ptrdiff_t worst = -1;
    double worst_d = p.buffer_m;
    for (std::size_t i = 0; i < n; ++i)
      if (keep[i] && cached[i].d > worst_d) {
        worst_d = cached[i].d;
        worst = static_cast<std::ptrdiff_t>(i);
      }
    if (worst >= 0) {
      drop(static_cast<std::size_t>(worst));
      continue;
    }

    // Outliers can sit near each other's segments and shield one another.
    // Starting from a vertex beyond the buffer from one of its live
    // neighbours, grow the set of vertices whose segments keep the members
    // inside the buffer, bridge the whole set out and test the members again.
    std::vector<std::size_t> alive;
    for (std::size_t j = 0; j < base_xy.size(); ++j)
      if (base_alive[j]) alive.push_back(j);
    auto gap = [&](std::size_t a, std::size_t b) {
      return std::hypot(base_xy[a].x - base_xy[b].x, base_xy[a].y - base_xy[b].y);
    };
    for (std::size_t k = 0; k < alive.size(); ++k) {
      if (!live_owner(alive[k])) continue;
      const bool jump = (k > 0 && gap(alive[k], alive[k - 1]) > p.buffer_m) ||
                        (k + 1 < alive.size() && gap(alive[k], alive[k + 1]) > p.buffer_m);
      if (!jump) continue;
      std::vector<std::size_t> group{alive[k]};
      for (bool grew = true; grew && group.size() < kMaxShieldGroup;) {
        grew = false;
        for (std::size_t m = 0; m < group.size() && group.size() < kMaxShieldGroup; ++m) {
          if (!live_owner(group[m])) continue;
          const Nearest near = nearest(base_xy[group[m]], group);
          if (near.d > p.buffer_m) continue;
          for (const std::size_t v : {near.a, near.b})
            if (std::find(group.begin(), group.end(), v) == group.end() && group.size() < kMaxShieldGroup) {
              group.push_back(v);
              grew = true;
            }
        }
      }
      for (const std::size_t v : group) {
        if (!live_owner(v)) continue;
        const double d = nearest(base_xy[v], group).d;
        if (d > worst_d) {
          worst_d = d;
          worst = owner[v];
        }
      }
    }
    if (worst < 0) break;
    drop(static_cast<std::size_t>(worst));
  }
  return split(track, keep);
}

TwoStageResult two_stage_filter(const FlightTrack& raw, const FilterParams& p) {
  p.validate();
  TwoStageResult out;
  out.stage1 = median_outlier_filter(raw, p);
  const FlightTrack& candidates = p.revalidate_rejected ? raw : out.stage1.clean;
  out.stage2 = utm_buffer_filter(candidates, out.stage1.clean, p);
  out.clean = out.stage2.clean;

  std::set<std::size_t> stage1_removed(out.stage1.removed_indices.begin(), out.stage1.removed_indices.end());
  if (!p.revalidate_rejected)
    for (const auto& r : out.stage1.removed) out.removed.emplace_back(r, "median");
  for (std::size_t k = 0; k < out.stage2.removed.size(); ++k) {
    const bool median_too = p.revalidate_rejected && stage1_removed.count(out.stage2.removed_indices[k]);
    out.removed.emplace_back(out.stage2.removed[k], median_too ? "median" : "buffer");
  }
  std::sort(out.removed.begin(), out.removed.end(),
            [](const auto& a, const auto& b) { return a.first.t < b.first.t; });
  return out;
}

}  // namespace hudtrack::trajectory
