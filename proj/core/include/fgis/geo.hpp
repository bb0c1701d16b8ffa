#pragma once

#include <vector>

namespace fgis {

// Mean Earth radius used by every distance computation.
inline constexpr double kEarthRadiusMeters = 6'371'000.0;

// Maps any finite longitude into [-180, 180). Values already in range are
// returned unchanged, so the function is idempotent.
double normalize_longitude(double lon) noexcept;

// WGS84 latitude/longitude in degrees. Construction validates latitude and
// normalizes longitude; a GeoPoint that exists is always valid.
class GeoPoint {
 public:
  constexpr GeoPoint() = default;

  // Throws Error(InvalidCoordinate) for a latitude outside [-90, 90] or a
  // non-finite component.
  GeoPoint(double lat, double lon);

  constexpr double lat() const noexcept { return lat_; }
  constexpr double lon() const noexcept { return lon_; }

  friend constexpr bool operator==(const GeoPoint&, const GeoPoint&) = default;

 private:
  double lat_ = 0.0;
  double lon_ = 0.0;
};

// True when lat/lon are finite and inside [-90, 90] x [-180, 180]. Parsers
// use this to reject out-of-range input before normalization would hide it.
bool is_valid_coordinate(double lat, double lon) noexcept;

// Axis-aligned lat/lon box. Never crosses the antimeridian: sw.lon <= ne.lon.
class BoundingBox {
 public:
  BoundingBox() = default;
  // Throws Error(InvalidCoordinate) when sw is north of ne or sw.lon > ne.lon.
  BoundingBox(GeoPoint sw, GeoPoint ne);

  // Builds from raw edges without longitude normalization so that an edge
  // of exactly +180 survives (whole-world and eastern-edge tiles).
  static BoundingBox from_edges(double south, double west, double north, double east);

  double south() const noexcept { return south_; }
  double west() const noexcept { return west_; }
  double north() const noexcept { return north_; }
  double east() const noexcept { return east_; }
  GeoPoint center() const;

  bool contains(const GeoPoint& p) const noexcept;
  bool intersects(const BoundingBox& other) const noexcept;

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;

 private:
  double south_ = 0.0;
  double west_ = 0.0;
  double north_ = 0.0;
  double east_ = 0.0;
};

// Great-circle distance in meters on a sphere of radius kEarthRadiusMeters.
// Symmetric bit-for-bit in its arguments.
double haversine_distance(const GeoPoint& a, const GeoPoint& b) noexcept;

// Conservative lat/lon boxes covering every point within `radius_m` of
// `center`. A circle that crosses the antimeridian yields two boxes; one
// that reaches a pole covers the full longitude range.
std::vector<BoundingBox> radius_prefilter_boxes(const GeoPoint& center, double radius_m);

}  // namespace fgis
