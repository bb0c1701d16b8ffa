#pragma once

#include <cstdint>
#include <string>

#include "fgis/geo.hpp"

namespace fgis {

// Latitude limit of the Web-Mercator square, as stated in the API contract.
// Edge tiles use this exact value for their outer edges so every accepted
// point lies inside its tile's box.
inline constexpr double kMaxMercatorLatitude = 85.05113;
inline constexpr int kMaxZoom = 30;

// Slippy-map tile address, y growing southward.
struct TileCoord {
  int z = 0;
  std::int64_t x = 0;
  std::int64_t y = 0;

  bool valid() const noexcept;
  std::string to_string() const;  // "z/x/y"

  friend constexpr auto operator<=>(const TileCoord&, const TileCoord&) = default;
};

// Throws Error(LatitudeOutOfProjection) for |lat| > kMaxMercatorLatitude and
// Error(ZoomOutOfRange) for z outside [0, kMaxZoom].
TileCoord point_to_tile(const GeoPoint& p, int z);

// Throws Error(InvalidTileCoord) when !t.valid().
BoundingBox tile_to_bbox(const TileCoord& t);

}  // namespace fgis
