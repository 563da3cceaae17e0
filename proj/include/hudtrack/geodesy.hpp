#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace hudtrack::geodesy {

struct GeoPoint {
  double lat = 0.0;  // degrees
  double lon = 0.0;  // degrees
};

enum class Hemisphere { North, South };

struct ProjectedPoint {
  double easting = 0.0;
  double northing = 0.0;
  int zone = 0;
  Hemisphere hemisphere = Hemisphere::North;
};

inline constexpr double kWgs84A = 6378137.0;
inline constexpr double kWgs84InvF = 298.257223563;
inline constexpr double kUtmK0 = 0.9996;
inline constexpr double kMeanEarthRadius = 6371008.8;
inline constexpr double kMetersPerDegree = 111320.0;

/// floor((lon + 180) / 6) + 1, clamped to [1, 60].
int utm_zone_for(double lon);

double central_meridian(int zone);

/// Transverse Mercator on WGS84 via the sixth-order Krueger series.
/// Throws Error{OutOfZone} when |lon - central meridian| > 9 degrees.
ProjectedPoint utm_forward(const GeoPoint& p, int zone);

/// k0 times the meridian arc from the equator.
double meridian_arc_utm(double lat_deg);

double haversine_m(const GeoPoint& a, const GeoPoint& b, double radius = kMeanEarthRadius);

/// Point reached by travelling `distance_m` along a great circle from
/// `start` at `bearing_deg` (clockwise from north) on a sphere.
GeoPoint destination(const GeoPoint& start, double bearing_deg, double distance_m,
                     double radius = kMeanEarthRadius);

/// K * sqrt(dlat^2 + dlon^2): Euclidean distance on raw degrees.
double raw_deg_m(const GeoPoint& a, const GeoPoint& b, double meters_per_degree = kMetersPerDegree);

struct UtmProjected {
  std::optional<int> zone;  // auto from median longitude when empty
};
struct Haversine {
  double radius = kMeanEarthRadius;
};
struct RawScaledDegrees {
  double meters_per_degree = kMetersPerDegree;
};

using DistanceMethod = std::variant<UtmProjected, Haversine, RawScaledDegrees>;

/// "utm", "haversine", "raw".
std::string method_name(const DistanceMethod& m);

/// Pinned method constants shared by every report.
struct MethodConstants {
  double earth_radius_m = kMeanEarthRadius;
  double meters_per_degree = kMetersPerDegree;
  std::optional<int> utm_zone;

  std::vector<DistanceMethod> all_methods() const;
};

/// Zone from the median longitude of `points`.
int auto_zone(std::span<const GeoPoint> points);

/// Pairwise consecutive distances under `method` (n - 1 values).
/// Throws Error{TooShort} for fewer than two points.
std::vector<double> consecutive_distances(std::span<const GeoPoint> points, const DistanceMethod& method);

double path_length(std::span<const GeoPoint> points, const DistanceMethod& method);

struct SpeedSample {
  double t = 0.0;
  double kmh = 0.0;
};

/// speed_i = 3.6 * d(p_i, p_{i+1}) / (t_{i+1} - t_i), stamped at t_{i+1}.
/// Throws Error{TooShort} or Error{TimeOrderError}.
std::vector<SpeedSample> segment_speeds(std::span<const GeoPoint> points, std::span<const double> times,
                                        const DistanceMethod& method);

}  // namespace hudtrack::geodesy
