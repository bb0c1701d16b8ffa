#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fgis/geo.hpp"
#include "fgis/time.hpp"

namespace fgis {

struct LineString {
  std::vector<GeoPoint> points;  // >= 2 points
  friend bool operator==(const LineString&, const LineString&) = default;
};

using Geometry = std::variant<GeoPoint, LineString>;

struct Feature {
  Geometry geometry;
  std::map<std::string, std::string> properties;
  std::optional<Timestamp> timestamp;

  friend bool operator==(const Feature&, const Feature&) = default;
};

enum class SourceFormat { Gpx, Kml, Gml, GeoJson, Csv };

std::string_view format_name(SourceFormat f) noexcept;
std::optional<SourceFormat> parse_format_name(std::string_view name) noexcept;

struct Provenance {
  std::string source_name;
  SourceFormat source_format = SourceFormat::GeoJson;
  Timestamp import_time{};
  std::string content_sha256;  // hex digest of the imported bytes
  std::size_t skipped_count = 0;  // unsupported geometries left out

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

// One imported layer: features in source order plus where they came from.
struct FeatureSet {
  std::vector<Feature> features;
  Provenance provenance;

  friend bool operator==(const FeatureSet&, const FeatureSet&) = default;
};

// Number of coordinates across all geometries.
std::size_t point_count(const FeatureSet& fs) noexcept;

}  // namespace fgis
