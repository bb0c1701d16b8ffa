#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

#include "fgis/analysis.hpp"
#include "fgis/error.hpp"

namespace fgis::analysis {

std::vector<AssociationScore> correlate_bt_anpr(std::span<const BtDetection> bt,
                                                std::span<const AnprDetection> anpr,
                                                const CorrelationParams& params) {
  if (!std::isfinite(params.max_time_gap_s) || !std::isfinite(params.max_distance_m) ||
      params.max_time_gap_s < 0.0 || params.max_distance_m < 0.0) {
    throw Error(ErrorCode::InvalidParameters, "time window and distance must be finite and >= 0");
  }

  std::vector<const AnprDetection*> by_time;
  by_time.reserve(anpr.size());
  for (const auto& a : anpr) by_time.push_back(&a);
  std::stable_sort(by_time.begin(), by_time.end(),
                   [](const auto* l, const auto* r) { return l->timestamp < r->timestamp; });

  const double window_ms = params.max_time_gap_s * 1000.0;
  auto ms = [](Timestamp t) { return static_cast<double>(t.time_since_epoch().count()); };

  struct Tally {
    std::size_t co_occurrences = 0;
    std::set<std::string> sensors;
  };
  std::map<std::pair<MacAddress, std::string>, Tally> tallies;

  std::set<std::string_view> plates_hit;
  for (const auto& b : bt) {
    const double t = ms(b.timestamp);
    auto it = std::lower_bound(by_time.begin(), by_time.end(), t - window_ms,
                               [&](const auto* a, double bound) { return ms(a->timestamp) < bound; });
    plates_hit.clear();
    for (; it != by_time.end() && ms((*it)->timestamp) <= t + window_ms; ++it) {
      const AnprDetection& a = **it;
      if (std::abs(ms(a.timestamp) - t) > window_ms) continue;
      if (haversine_distance(a.position, b.position) > params.max_distance_m) continue;
      // Several qualifying reads of one plate still pair this detection once.
      plates_hit.insert(a.plate);
    }
    for (auto plate : plates_hit) {
      auto& tally = tallies[{b.mac, std::string(plate)}];
      ++tally.co_occurrences;
      tally.sensors.insert(b.sensor_id);
    }
  }

  std::vector<AssociationScore> out;
  out.reserve(tallies.size());
  for (auto& [key, tally] : tallies) {
    AssociationScore s;
    s.mac = key.first;
    s.plate = key.second;
    s.co_occurrences = tally.co_occurrences;
    s.distinct_sensors = tally.sensors.size();
    s.score = static_cast<double>(s.co_occurrences) * static_cast<double>(s.distinct_sensors);
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end(), [](const AssociationScore& l, const AssociationScore& r) {
    return std::tie(r.score, r.co_occurrences, l.mac, l.plate) <
           std::tie(l.score, l.co_occurrences, r.mac, r.plate);
  });
  return out;
}

}  // namespace fgis::analysis
