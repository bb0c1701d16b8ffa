#include <cmath>

#include "fgis/analysis.hpp"
#include "fgis/error.hpp"

namespace fgis::analysis {

std::vector<StopSegment> detect_stops(const GpsTrack& track, const StopParams& params) {
  if (!(params.radius_m > 0.0) || !(params.min_dwell_s > 0.0) || !std::isfinite(params.radius_m) ||
      !std::isfinite(params.min_dwell_s)) {
    throw Error(ErrorCode::InvalidParameters, "epsilon_m and tau_s must be positive");
  }
  if (track.points.empty()) throw Error(ErrorCode::InvalidParameters, "track has no points");

  const auto& pts = track.points;
  std::vector<StopSegment> stops;
  std::size_t i = 0;
  while (i < pts.size()) {
    std::size_t j = i;
    while (j + 1 < pts.size() &&
           haversine_distance(pts[j + 1].position, pts[i].position) <= params.radius_m) {
      ++j;
    }
    const double dwell = seconds_between(pts[i].timestamp, pts[j].timestamp);
    if (j > i && dwell >= params.min_dwell_s) {
      double lat = 0.0, lon_sum = 0.0;
      // Average longitudes relative to the anchor so a stop straddling the
      // antimeridian does not average to the opposite side of the globe.
      const double anchor_lon = pts[i].position.lon();
      for (std::size_t k = i; k <= j; ++k) {
        lat += pts[k].position.lat();
        lon_sum += normalize_longitude(pts[k].position.lon() - anchor_lon);
      }
      const double n = static_cast<double>(j - i + 1);
      stops.push_back(StopSegment{GeoPoint(lat / n, anchor_lon + lon_sum / n), pts[i].timestamp,
                                  pts[j].timestamp, dwell, i, j});
      i = j + 1;
    } else {
      ++i;
    }
  }
  return stops;
}

GpsTrack timeline_slice(const GpsTrack& track, Timestamp from, Timestamp to) {
  if (from > to) throw Error(ErrorCode::InvalidParameters, "'from' is after 'to'");
  GpsTrack out;
  out.track_id = track.track_id;
  out.label = track.label;
  for (const auto& p : track.points) {
    if (p.timestamp >= from && p.timestamp <= to) out.points.push_back(p);
  }
  return out;
}

}  // namespace fgis::analysis
