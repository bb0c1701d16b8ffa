#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "fgis/geo.hpp"

namespace fgis {

// Uniform lat/lon bucket grid. Build by insert(), then query from any number
// of threads; the index never mutates during a query.
//
// query_radius() is exact: the grid only narrows the candidate set and every
// candidate is confirmed with haversine_distance, so the result equals a
// linear scan over all inserted items.
class GridIndex {
 public:
  using ItemId = std::uint64_t;

  struct Entry {
    ItemId id;
    GeoPoint position;
  };

  explicit GridIndex(double cell_size_deg = 0.01);

  void insert(ItemId id, const GeoPoint& position);

  // Ids with haversine_distance(position, center) <= radius_m, ascending,
  // without duplicates.
  std::vector<ItemId> query_radius(const GeoPoint& center, double radius_m) const;

  std::size_t size() const noexcept { return size_; }
  double cell_size() const noexcept { return cell_size_; }

 private:
  std::int64_t row_of(double lat) const noexcept;
  std::int64_t col_of(double lon) const noexcept;
  static std::uint64_t key(std::int64_t row, std::int64_t col) noexcept;

  double cell_size_;
  std::size_t size_ = 0;
  std::unordered_map<std::uint64_t, std::vector<Entry>> cells_;
};

}  // namespace fgis
