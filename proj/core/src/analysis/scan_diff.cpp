#include "fgis/analysis.hpp"

namespace fgis::analysis {

std::map<MacAddress, std::optional<std::string>> latest_ssids(const WifiScan& scan) {
  std::map<MacAddress, const WifiObservation*> latest;
  for (const auto& obs : scan.observations) {
    auto [it, inserted] = latest.emplace(obs.bssid, &obs);
    // >= so that of two equally recent sightings the later row wins.
    if (!inserted && obs.timestamp >= it->second->timestamp) it->second = &obs;
  }
  std::map<MacAddress, std::optional<std::string>> out;
  for (const auto& [mac, obs] : latest) out.emplace(mac, obs->ssid);
  return out;
}

ScanDiff diff_scans(const WifiScan& a, const WifiScan& b) {
  const auto before = latest_ssids(a);
  const auto after = latest_ssids(b);
  ScanDiff diff;
  for (const auto& [mac, ssid] : before) {
    auto it = after.find(mac);
    if (it == after.end()) {
      diff.removed.insert(mac);
    } else if (it->second == ssid) {
      diff.unchanged.insert(mac);
    } else {
      diff.renamed.emplace(mac, SsidChange{ssid, it->second});
    }
  }
  for (const auto& [mac, ssid] : after) {
    if (!before.contains(mac)) diff.added.insert(mac);
  }
  return diff;
}

}  // namespace fgis::analysis
