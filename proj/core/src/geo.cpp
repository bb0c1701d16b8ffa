#include "fgis/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "fgis/error.hpp"

namespace fgis {
namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

// Slack added to prefilter boxes so rounding in the haversine refinement can
// never place an accepted point outside its box (~1 cm).
constexpr double kPrefilterMarginDeg = 1e-7;

}  // namespace

double normalize_longitude(double lon) noexcept {
  if (lon >= -180.0 && lon < 180.0) return lon;
  double r = std::fmod(lon + 180.0, 360.0);
  if (r < 0.0) r += 360.0;
  double out = r - 180.0;
  if (out >= 180.0) out -= 360.0;
  return out;
}

bool is_valid_coordinate(double lat, double lon) noexcept {
  return std::isfinite(lat) && std::isfinite(lon) && lat >= -90.0 && lat <= 90.0 &&
         lon >= -180.0 && lon <= 180.0;
}

GeoPoint::GeoPoint(double lat, double lon) {
  if (!std::isfinite(lat) || !std::isfinite(lon) || lat < -90.0 || lat > 90.0) {
    throw Error(ErrorCode::InvalidCoordinate,
                "coordinate out of range: lat=" + std::to_string(lat) +
                    " lon=" + std::to_string(lon));
  }
  lat_ = lat;
  lon_ = normalize_longitude(lon);
}

BoundingBox::BoundingBox(GeoPoint sw, GeoPoint ne)
    : BoundingBox(from_edges(sw.lat(), sw.lon(), ne.lat(), ne.lon())) {}

BoundingBox BoundingBox::from_edges(double south, double west, double north, double east) {
  if (!(south <= north) || !(west <= east) || !is_valid_coordinate(south, west) ||
      !is_valid_coordinate(north, east)) {
    throw Error(ErrorCode::InvalidCoordinate, "invalid bounding box edges");
  }
  BoundingBox box;
  box.south_ = south;
  box.west_ = west;
  box.north_ = north;
  box.east_ = east;
  return box;
}

GeoPoint BoundingBox::center() const {
  return GeoPoint((south_ + north_) / 2.0, (west_ + east_) / 2.0);
}

bool BoundingBox::contains(const GeoPoint& p) const noexcept {
  return p.lat() >= south_ && p.lat() <= north_ && p.lon() >= west_ && p.lon() <= east_;
}

bool BoundingBox::intersects(const BoundingBox& o) const noexcept {
  return !(o.east_ < west_ || o.west_ > east_ || o.north_ < south_ || o.south_ > north_);
}

double haversine_distance(const GeoPoint& a, const GeoPoint& b) noexcept {
  const double phi1 = a.lat() * kDegToRad;
  const double phi2 = b.lat() * kDegToRad;
  const double sin_dphi = std::sin((phi2 - phi1) / 2.0);
  const double sin_dlambda = std::sin((b.lon() - a.lon()) * kDegToRad / 2.0);
  double h = sin_dphi * sin_dphi + std::cos(phi1) * std::cos(phi2) * sin_dlambda * sin_dlambda;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusMeters * std::atan2(std::sqrt(h), std::sqrt(1.0 - h));
}

std::vector<BoundingBox> radius_prefilter_boxes(const GeoPoint& center, double radius_m) {
  const double delta = std::max(radius_m, 0.0) / kEarthRadiusMeters;  // angular radius
  if (delta >= std::numbers::pi) {
    return {BoundingBox::from_edges(-90.0, -180.0, 90.0, 180.0)};
  }

  const double dlat = delta * kRadToDeg + kPrefilterMarginDeg;
  const double south = std::max(-90.0, center.lat() - dlat);
  const double north = std::min(90.0, center.lat() + dlat);

  const double phi = center.lat() * kDegToRad;
  if (center.lat() + dlat >= 90.0 || center.lat() - dlat <= -90.0 ||
      std::abs(phi) + delta >= std::numbers::pi / 2.0) {
    return {BoundingBox::from_edges(south, -180.0, north, 180.0)};
  }

  const double ratio = std::min(1.0, std::sin(delta) / std::cos(phi));
  const double dlon = std::asin(ratio) * kRadToDeg * (1.0 + 1e-9) + kPrefilterMarginDeg;
  if (dlon >= 180.0) {
    return {BoundingBox::from_edges(south, -180.0, north, 180.0)};
  }

  const double west = center.lon() - dlon;
  const double east = center.lon() + dlon;
  std::vector<BoundingBox> boxes;
  if (west < -180.0) {
    boxes.push_back(BoundingBox::from_edges(south, west + 360.0, north, 180.0));
    boxes.push_back(BoundingBox::from_edges(south, -180.0, north, east));
  } else if (east > 180.0) {
    boxes.push_back(BoundingBox::from_edges(south, west, north, 180.0));
    boxes.push_back(BoundingBox::from_edges(south, -180.0, north, east - 360.0));
  } else {
    boxes.push_back(BoundingBox::from_edges(south, west, north, east));
  }
  return boxes;
}

}  // namespace fgis
