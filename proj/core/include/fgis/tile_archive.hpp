#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fgis/geo.hpp"
#include "fgis/tile_math.hpp"

namespace fgis::tiles {

struct TileManifest {
  std::string name;
  std::string attribution;
  int min_zoom = 0;
  int max_zoom = 0;
  BoundingBox bounds;
  std::string tile_format = "png";
  std::uint64_t tile_count = 0;

  friend bool operator==(const TileManifest&, const TileManifest&) = default;
};

// Throws Error(CorruptManifest) naming the offending field.
TileManifest parse_manifest(std::string_view json_text);
std::string serialize_manifest(const TileManifest& m);

struct Violation {
  enum class Kind { OutsideEnvelope, NotPng, StrayFile, CountMismatch };
  Kind kind;
  std::string path;  // relative to the archive root; empty for CountMismatch
  std::string detail;
};

std::string_view kind_name(Violation::Kind k) noexcept;

struct VerifyReport {
  std::vector<Violation> violations;  // sorted by path
  std::uint64_t tiles_found = 0;      // in-envelope PNG tiles

  bool clean() const noexcept { return violations.empty(); }
};

struct CacheStats {
  std::size_t capacity = 0;
  std::size_t resident = 0;
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
};

using TileBytes = std::shared_ptr<const std::string>;

// Read-only view of a `{z}/{x}/{y}.png` directory archive with a bounded LRU
// cache in front of the filesystem. Safe to share across threads.
class TileArchive {
 public:
  // Throws Error(MissingManifest) when <root>/manifest.json is absent and
  // Error(CorruptManifest) when it does not validate. cache_capacity 0
  // disables caching.
  static TileArchive open(const std::filesystem::path& root, std::size_t cache_capacity = 1024);

  TileArchive(TileArchive&&) noexcept;
  TileArchive& operator=(TileArchive&&) noexcept;
  ~TileArchive();

  const TileManifest& manifest() const noexcept;
  const std::filesystem::path& root() const noexcept;

  // Stored bytes, verbatim; nullptr when the tile is absent. Throws
  // Error(ZoomOutOfRange) outside [min_zoom, max_zoom] and
  // Error(InvalidTileCoord) when x/y fall outside the zoom level's grid.
  TileBytes get_tile(const TileCoord& t) const;

  VerifyReport verify() const;
  CacheStats cache_stats() const;

 private:
  struct Impl;
  explicit TileArchive(std::unique_ptr<Impl> impl);
  std::unique_ptr<Impl> impl_;
};

}  // namespace fgis::tiles
