#include "hudtrack/telemetry.hpp"

#include "hudtrack/error.hpp"

namespace hudtrack {

std::vector<geodesy::GeoPoint> FlightTrack::points() const {
  std::vector<geodesy::GeoPoint> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.point());
  return out;
}

std::vector<double> FlightTrack::times() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.t);
  return out;
}

void FlightTrack::validate() const {
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!(r.t >= 0.0)) throw Error(ErrorCode::TimeOrderError, "negative timestamp");
    if (i > 0 && !(r.t > records[i - 1].t))
      throw Error(ErrorCode::TimeOrderError, "timestamps must be strictly increasing");
    if (!(r.lat >= -90.0 && r.lat <= 90.0) || !(r.lon >= -180.0 && r.lon <= 180.0))
      throw Error(ErrorCode::RangeInvalid, "coordinate outside WGS84 range at t=" + std::to_string(r.t));
  }
}

std::string format_status(const std::vector<FieldIssue>& issues) {
  if (issues.empty()) return "ok";
  std::string out;
  for (const auto& i : issues) {
    if (!out.empty()) out += ';';
    out += i.field + ':' + i.code;
  }
  return out;
}

std::vector<FieldIssue> parse_status(const std::string& text) {
  std::vector<FieldIssue> out;
  if (text.empty() || text == "ok") return out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = std::min(text.find(';', start), text.size());
    const std::string item = text.substr(start, end - start);
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw Error(ErrorCode::CharInvalid, "bad status entry '" + item + "'");
    out.push_back({item.substr(0, colon), item.substr(colon + 1)});
    start = end + 1;
  }
  return out;
}

}  // namespace hudtrack
