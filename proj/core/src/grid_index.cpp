#include "fgis/grid_index.hpp"

#include <algorithm>
#include <cmath>

#include "fgis/error.hpp"

namespace fgis {

GridIndex::GridIndex(double cell_size_deg) : cell_size_(cell_size_deg) {
  if (!(cell_size_deg > 0.0) || cell_size_deg > 360.0) {
    throw Error(ErrorCode::InvalidParameters, "grid cell size must be in (0, 360] degrees");
  }
}

std::int64_t GridIndex::row_of(double lat) const noexcept {
  return static_cast<std::int64_t>(std::floor((lat + 90.0) / cell_size_));
}

std::int64_t GridIndex::col_of(double lon) const noexcept {
  return static_cast<std::int64_t>(std::floor((lon + 180.0) / cell_size_));
}

std::uint64_t GridIndex::key(std::int64_t row, std::int64_t col) noexcept {
  return (static_cast<std::uint64_t>(row) << 32) ^ static_cast<std::uint64_t>(col & 0xffffffff);
}

void GridIndex::insert(ItemId id, const GeoPoint& position) {
  cells_[key(row_of(position.lat()), col_of(position.lon()))].push_back(Entry{id, position});
  ++size_;
}

std::vector<GridIndex::ItemId> GridIndex::query_radius(const GeoPoint& center,
                                                       double radius_m) const {
  std::vector<ItemId> out;
  if (size_ == 0 || radius_m < 0.0) return out;

  auto refine = [&](const std::vector<Entry>& bucket) {
    for (const auto& e : bucket) {
      if (haversine_distance(e.position, center) <= radius_m) out.push_back(e.id);
    }
  };

  for (const auto& box : radius_prefilter_boxes(center, radius_m)) {
    const std::int64_t r0 = row_of(box.south());
    const std::int64_t r1 = row_of(box.north());
    const std::int64_t c0 = col_of(box.west());
    const std::int64_t c1 = col_of(box.east());
    const double span = static_cast<double>(r1 - r0 + 1) * static_cast<double>(c1 - c0 + 1);

    if (span > static_cast<double>(cells_.size())) {
      // Sparse grid relative to the query: walk occupied cells instead.
      for (const auto& [k, bucket] : cells_) {
        const auto& probe = bucket.front().position;
        const std::int64_t r = row_of(probe.lat());
        const std::int64_t c = col_of(probe.lon());
        if (r >= r0 && r <= r1 && c >= c0 && c <= c1) refine(bucket);
      }
      continue;
    }
    for (std::int64_t r = r0; r <= r1; ++r) {
      for (std::int64_t c = c0; c <= c1; ++c) {
        auto it = cells_.find(key(r, c));
        if (it != cells_.end()) refine(it->second);
      }
    }
  }

  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace fgis
