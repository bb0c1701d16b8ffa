#include "fgis/tile_math.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fgis/error.hpp"

namespace fgis {
namespace {

double tile_west(std::int64_t x, int z) {
  return static_cast<double>(x) / std::ldexp(1.0, z) * 360.0 - 180.0;
}

// Latitude of the northern edge of row y.
double tile_north(std::int64_t y, int z) {
  const std::int64_t n = std::int64_t{1} << z;
  if (y <= 0) return kMaxMercatorLatitude;
  if (y >= n) return -kMaxMercatorLatitude;
  const double merc = std::numbers::pi * (1.0 - 2.0 * static_cast<double>(y) / static_cast<double>(n));
  return std::atan(std::sinh(merc)) * 180.0 / std::numbers::pi;
}

}  // namespace

bool TileCoord::valid() const noexcept {
  if (z < 0 || z > kMaxZoom) return false;
  const std::int64_t n = std::int64_t{1} << z;
  return x >= 0 && x < n && y >= 0 && y < n;
}

std::string TileCoord::to_string() const {
  return std::to_string(z) + "/" + std::to_string(x) + "/" + std::to_string(y);
}

TileCoord point_to_tile(const GeoPoint& p, int z) {
  if (z < 0 || z > kMaxZoom) {
    throw Error(ErrorCode::ZoomOutOfRange, "zoom " + std::to_string(z) + " outside [0, 30]");
  }
  if (std::abs(p.lat()) > kMaxMercatorLatitude) {
    throw Error(ErrorCode::LatitudeOutOfProjection,
                "latitude " + std::to_string(p.lat()) + " outside the Web-Mercator range");
  }
  const std::int64_t n = std::int64_t{1} << z;
  const double scale = static_cast<double>(n);
  const double phi = p.lat() * std::numbers::pi / 180.0;

  auto x = static_cast<std::int64_t>(std::floor((p.lon() + 180.0) / 360.0 * scale));
  auto y = static_cast<std::int64_t>(
      std::floor((1.0 - std::log(std::tan(phi) + 1.0 / std::cos(phi)) / std::numbers::pi) / 2.0 * scale));
  x = std::clamp<std::int64_t>(x, 0, n - 1);
  y = std::clamp<std::int64_t>(y, 0, n - 1);

  // The closed-form results can land one tile off when the point sits within
  // rounding distance of an edge; settle against the edges tile_to_bbox uses.
  if (x > 0 && p.lon() < tile_west(x, z)) --x;
  if (x < n - 1 && p.lon() > tile_west(x + 1, z)) ++x;
  if (y > 0 && p.lat() > tile_north(y, z)) --y;
  if (y < n - 1 && p.lat() < tile_north(y + 1, z)) ++y;
  return TileCoord{z, x, y};
}

BoundingBox tile_to_bbox(const TileCoord& t) {
  if (!t.valid()) {
    throw Error(ErrorCode::InvalidTileCoord, "invalid tile " + t.to_string());
  }
  return BoundingBox::from_edges(tile_north(t.y + 1, t.z), tile_west(t.x, t.z), tile_north(t.y, t.z),
                                 tile_west(t.x + 1, t.z));
}

}  // namespace fgis
