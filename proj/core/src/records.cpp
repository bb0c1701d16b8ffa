#include "fgis/records.hpp"

#include <algorithm>
#include <cctype>

#include "fgis/feature.hpp"

namespace fgis {

std::string_view category_name(CameraCategory c) noexcept {
  switch (c) {
    case CameraCategory::Public: return "public";
    case CameraCategory::Private: return "private";
    case CameraCategory::Unknown: return "unknown";
  }
  return "unknown";
}

std::optional<CameraCategory> parse_category(std::string_view text) noexcept {
  std::string lower;
  for (char c : text) {
    if (c == ' ' || c == '\t') continue;
    lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (lower == "public") return CameraCategory::Public;
  if (lower == "private") return CameraCategory::Private;
  if (lower == "unknown") return CameraCategory::Unknown;
  return std::nullopt;
}

void WifiScan::derive_capture_range() {
  if (observations.empty()) {
    captured_from = captured_to = Timestamp{};
    return;
  }
  const auto [lo, hi] = std::minmax_element(
      observations.begin(), observations.end(),
      [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
  captured_from = lo->timestamp;
  captured_to = hi->timestamp;
}

bool GpsTrack::timestamps_monotonic() const noexcept {
  return std::is_sorted(points.begin(), points.end(),
                        [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });
}

std::string normalize_plate(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    out.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
  }
  return out;
}

std::string_view format_name(SourceFormat f) noexcept {
  switch (f) {
    case SourceFormat::Gpx: return "GPX";
    case SourceFormat::Kml: return "KML";
    case SourceFormat::Gml: return "GML";
    case SourceFormat::GeoJson: return "GeoJSON";
    case SourceFormat::Csv: return "CSV";
  }
  return "GeoJSON";
}

std::optional<SourceFormat> parse_format_name(std::string_view name) noexcept {
  for (auto f : {SourceFormat::Gpx, SourceFormat::Kml, SourceFormat::Gml, SourceFormat::GeoJson,
                 SourceFormat::Csv}) {
    if (format_name(f) == name) return f;
  }
  return std::nullopt;
}

std::size_t point_count(const FeatureSet& fs) noexcept {
  std::size_t n = 0;
  for (const auto& f : fs.features) {
    if (const auto* line = std::get_if<LineString>(&f.geometry)) {
      n += line->points.size();
    } else {
      ++n;
    }
  }
  return n;
}

}  // namespace fgis
