#include "fgis/ingest.hpp"

namespace fgis::ingest {
namespace {

std::optional<std::vector<Timestamp>> split_times(const std::string& joined, std::size_t expected) {
  std::vector<Timestamp> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = joined.find(',', start);
    const auto token = std::string_view(joined).substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    auto t = parse_iso8601_utc(token);
    if (!t) return std::nullopt;
    out.push_back(*t);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.size() != expected) return std::nullopt;
  return out;
}

std::string track_label(const Feature& f) {
  auto it = f.properties.find("name");
  return it != f.properties.end() ? it->second : std::string("track");
}

}  // namespace

TrackExtraction tracks_from_features(const FeatureSet& fs) {
  TrackExtraction out;
  for (const auto& f : fs.features) {
    auto kind = f.properties.find("kind");
    if (kind == f.properties.end() || kind->second != "track") continue;

    GpsTrack track;
    track.label = track_label(f);
    if (const auto* pt = std::get_if<GeoPoint>(&f.geometry)) {
      if (!f.timestamp) {
        ++out.skipped;
        continue;
      }
      track.points.push_back({*pt, *f.timestamp});
    } else {
      const auto& line = std::get<LineString>(f.geometry);
      auto times_it = f.properties.find("coord_times");
      if (times_it == f.properties.end()) {
        ++out.skipped;
        continue;
      }
      auto times = split_times(times_it->second, line.points.size());
      if (!times) {
        ++out.skipped;
        continue;
      }
      for (std::size_t i = 0; i < line.points.size(); ++i) {
        track.points.push_back({line.points[i], (*times)[i]});
      }
    }
    if (!track.timestamps_monotonic()) {
      ++out.skipped;
      continue;
    }
    out.tracks.push_back(std::move(track));
  }
  return out;
}

}  // namespace fgis::ingest
