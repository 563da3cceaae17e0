#include "hudtrack/geodesy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "hudtrack/error.hpp"

namespace hudtrack::geodesy {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

struct KruegerSeries {
  double e;           // first eccentricity
  double a_rect;      // rectifying radius A
  std::array<double, 6> alpha;
};

const KruegerSeries& series() {
  static const KruegerSeries s = [] {
    const double f = 1.0 / kWgs84InvF;
    const double n = f / (2.0 - f);
    const double n2 = n * n, n3 = n2 * n, n4 = n3 * n, n5 = n4 * n, n6 = n5 * n;
    KruegerSeries k{};
    k.e = std::sqrt(f * (2.0 - f));
    k.a_rect = kWgs84A / (1.0 + n) * (1.0 + n2 / 4.0 + n4 / 64.0 + n6 / 256.0);
    k.alpha = {
        n / 2.0 - 2.0 * n2 / 3.0 + 5.0 * n3 / 16.0 + 41.0 * n4 / 180.0 - 127.0 * n5 / 288.0 +
            7891.0 * n6 / 37800.0,
        13.0 * n2 / 48.0 - 3.0 * n3 / 5.0 + 557.0 * n4 / 1440.0 + 281.0 * n5 / 630.0 -
            1983433.0 * n6 / 1935360.0,
        61.0 * n3 / 240.0 - 103.0 * n4 / 140.0 + 15061.0 * n5 / 26880.0 + 167603.0 * n6 / 181440.0,
        49561.0 * n4 / 161280.0 - 179.0 * n5 / 168.0 + 6601661.0 * n6 / 7257600.0,
        34729.0 * n5 / 80640.0 - 3418889.0 * n6 / 1995840.0,
        212378941.0 * n6 / 319334400.0,
    };
    return k;
  }();
  return s;
}

// Gauss-Krueger (xi, eta) for geodetic latitude and longitude offset, radians.
std::pair<double, double> krueger(double phi, double lam) {
  const auto& k = series();
  const double tau = std::tan(phi);
  const double sigma = std::sinh(k.e * std::atanh(k.e * tau / std::hypot(1.0, tau)));
  const double tau_c = tau * std::hypot(1.0, sigma) - sigma * std::hypot(1.0, tau);
  const double xi_p = std::atan2(tau_c, std::cos(lam));
  const double eta_p = std::asinh(std::sin(lam) / std::hypot(tau_c, std::cos(lam)));
  double xi = xi_p, eta = eta_p;
  for (int j = 1; j <= 6; ++j) {
    const double a = k.alpha[static_cast<std::size_t>(j - 1)];
    xi += a * std::sin(2.0 * j * xi_p) * std::cosh(2.0 * j * eta_p);
    eta += a * std::cos(2.0 * j * xi_p) * std::sinh(2.0 * j * eta_p);
  }
  return {xi, eta};
}

}  // namespace

int utm_zone_for(double lon) {
  const int zone = static_cast<int>(std::floor((lon + 180.0) / 6.0)) + 1;
  return std::clamp(zone, 1, 60);
}

double central_meridian(int zone) { return 6.0 * zone - 183.0; }

ProjectedPoint utm_forward(const GeoPoint& p, int zone) {
  if (zone < 1 || zone > 60) throw Error(ErrorCode::OutOfZone, "UTM zone must lie in [1,60]");
  if (!(p.lat >= -90.0 && p.lat <= 90.0))
    throw Error(ErrorCode::OutOfZone, "latitude outside [-90,90]");
  double dlon = p.lon - central_meridian(zone);
  if (dlon > 180.0) dlon -= 360.0;
  if (dlon < -180.0) dlon += 360.0;
  if (std::abs(dlon) > 9.0)
    throw Error(ErrorCode::OutOfZone, "longitude " + std::to_string(p.lon) + " is " +
                                          std::to_string(dlon) + " deg from zone " +
                                          std::to_string(zone) + " central meridian");
  const auto [xi, eta] = krueger(p.lat * kDeg, dlon * kDeg);
  const double scale = kUtmK0 * series().a_rect;
  ProjectedPoint out;
  out.zone = zone;
  out.hemisphere = p.lat < 0.0 ? Hemisphere::South : Hemisphere::North;
  out.easting = 500000.0 + scale * eta;
  out.northing = scale * xi + (out.hemisphere == Hemisphere::South ? 10000000.0 : 0.0);
  return out;
}

double meridian_arc_utm(double lat_deg) {
  return kUtmK0 * series().a_rect * krueger(lat_deg * kDeg, 0.0).first;
}

double haversine_m(const GeoPoint& a, const GeoPoint& b, double radius) {
  const double p1 = a.lat * kDeg, p2 = b.lat * kDeg;
  const double dp = p2 - p1, dl = (b.lon - a.lon) * kDeg;
  const double s1 = std::sin(dp / 2.0), s2 = std::sin(dl / 2.0);
  const double h = s1 * s1 + std::cos(p1) * std::cos(p2) * s2 * s2;
  return 2.0 * radius * std::asin(std::sqrt(std::min(1.0, h)));
}

GeoPoint destination(const GeoPoint& start, double bearing_deg, double distance_m, double radius) {
  const double d = distance_m / radius;
  const double p1 = start.lat * kDeg, l1 = start.lon * kDeg, th = bearing_deg * kDeg;
  const double p2 = std::asin(std::sin(p1) * std::cos(d) + std::cos(p1) * std::sin(d) * std::cos(th));
  const double l2 = l1 + std::atan2(std::sin(th) * std::sin(d) * std::cos(p1),
                                    std::cos(d) - std::sin(p1) * std::sin(p2));
  double lon = l2 / kDeg;
  lon = std::fmod(lon + 540.0, 360.0) - 180.0;
  return {p2 / kDeg, lon};
}

double raw_deg_m(const GeoPoint& a, const GeoPoint& b, double meters_per_degree) {
  return meters_per_degree * std::hypot(b.lat - a.lat, b.lon - a.lon);
}

std::string method_name(const DistanceMethod& m) {
  struct {
    std::string operator()(const UtmProjected&) const { return "utm"; }
    std::string operator()(const Haversine&) const { return "haversine"; }
    std::string operator()(const RawScaledDegrees&) const { return "raw"; }
  } visitor;
  return std::visit(visitor, m);
}

std::vector<DistanceMethod> MethodConstants::all_methods() const {
  return {UtmProjected{utm_zone}, Haversine{earth_radius_m}, RawScaledDegrees{meters_per_degree}};
}

int auto_zone(std::span<const GeoPoint> points) {
  if (points.empty()) throw Error(ErrorCode::TooShort, "no points to choose a UTM zone from");
  std::vector<double> lons;
  lons.reserve(points.size());
  for (const auto& p : points) lons.push_back(p.lon);
  const auto mid = lons.begin() + static_cast<std::ptrdiff_t>(lons.size() / 2);
  std::nth_element(lons.begin(), mid, lons.end());
  double median = *mid;
  if (lons.size() % 2 == 0) median = (median + *std::max_element(lons.begin(), mid)) / 2.0;
  return utm_zone_for(median);
}

std::vector<double> consecutive_distances(std::span<const GeoPoint> points, const DistanceMethod& method) {
  if (points.size() < 2) throw Error(ErrorCode::TooShort, "need at least two points");
  std::vector<double> out;
  out.reserve(points.size() - 1);
  if (const auto* utm = std::get_if<UtmProjected>(&method)) {
    const int zone = utm->zone ? *utm->zone : auto_zone(points);
    ProjectedPoint prev = utm_forward(points[0], zone);
    for (std::size_t i = 1; i < points.size(); ++i) {
      const ProjectedPoint cur = utm_forward(points[i], zone);
      // Same zone: the southern false northing cancels unless the equator is crossed.
      const double dn = (cur.northing - (cur.hemisphere == Hemisphere::South ? 1e7 : 0.0)) -
                        (prev.northing - (prev.hemisphere == Hemisphere::South ? 1e7 : 0.0));
      out.push_back(std::hypot(cur.easting - prev.easting, dn));
      prev = cur;
    }
  } else if (const auto* hav = std::get_if<Haversine>(&method)) {
    for (std::size_t i = 1; i < points.size(); ++i)
      out.push_back(haversine_m(points[i - 1], points[i], hav->radius));
  } else {
    const auto& raw = std::get<RawScaledDegrees>(method);
    for (std::size_t i = 1; i < points.size(); ++i)
      out.push_back(raw_deg_m(points[i - 1], points[i], raw.meters_per_degree));
  }
  return out;
}

double path_length(std::span<const GeoPoint> points, const DistanceMethod& method) {
  double total = 0.0;
  for (double d : consecutive_distances(points, method)) total += d;
  return total;
}

std::vector<SpeedSample> segment_speeds(std::span<const GeoPoint> points, std::span<const double> times,
                                        const DistanceMethod& method) {
  if (points.size() != times.size())
    throw Error(ErrorCode::TimeOrderError, "points and timestamps differ in length");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw Error(ErrorCode::TimeOrderError, "timestamps must be strictly increasing");
  const auto dists = consecutive_distances(points, method);
  std::vector<SpeedSample> out;
  out.reserve(dists.size());
  for (std::size_t i = 0; i < dists.size(); ++i)
    out.push_back({times[i + 1], 3.6 * dists[i] / (times[i + 1] - times[i])});
  return out;
}

}  // namespace hudtrack::geodesy
