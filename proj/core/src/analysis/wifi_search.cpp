#include <algorithm>
#include <tuple>

#include "fgis/analysis.hpp"
#include "fgis/error.hpp"

namespace fgis::analysis {
namespace {

struct Ranked {
  Timestamp timestamp;
  const std::string* scan_id;
  std::size_t index;
  const WifiObservation* obs;

  friend bool operator<(const Ranked& l, const Ranked& r) {
    return std::tie(l.timestamp, *l.scan_id, l.index) < std::tie(r.timestamp, *r.scan_id, r.index);
  }
};

template <typename Pred>
std::vector<Ranked> collect(std::span<const WifiScan> scans, Pred&& matches) {
  std::vector<Ranked> hits;
  for (const auto& scan : scans) {
    for (std::size_t i = 0; i < scan.observations.size(); ++i) {
      const auto& obs = scan.observations[i];
      if (matches(obs.bssid)) hits.push_back({obs.timestamp, &scan.scan_id, i, &obs});
    }
  }
  std::sort(hits.begin(), hits.end());
  return hits;
}

}  // namespace

BssidQuery parse_bssid_query(std::string_view text) {
  if (auto mac = MacAddress::parse(text)) return *mac;
  if (auto oui = OuiPrefix::parse(text)) return *oui;
  throw Error(ErrorCode::MalformedQuery,
              "query must be a full MAC (AA:BB:CC:DD:EE:FF) or an OUI prefix (AA:BB:CC)");
}

std::vector<ObservationHit> search_bssid(const BssidQuery& query, std::span<const WifiScan> scans) {
  const auto hits = collect(scans, [&](const MacAddress& bssid) {
    if (const auto* mac = std::get_if<MacAddress>(&query)) return bssid == *mac;
    return std::get<OuiPrefix>(query).matches(bssid);
  });
  std::vector<ObservationHit> out;
  out.reserve(hits.size());
  for (const auto& h : hits) out.push_back({*h.scan_id, *h.obs});
  return out;
}

std::vector<PresenceEvidence> presence_report(const std::set<MacAddress>& known,
                                              std::span<const WifiScan> scans) {
  const auto hits = collect(scans, [&](const MacAddress& bssid) { return known.contains(bssid); });
  std::vector<PresenceEvidence> out;
  out.reserve(hits.size());
  for (const auto& h : hits) {
    out.push_back({h.obs->bssid, h.obs->position, h.obs->timestamp, *h.scan_id, h.obs->ssid});
  }
  return out;
}

}  // namespace fgis::analysis
