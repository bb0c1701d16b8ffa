#include "api/json_codec.hpp"

namespace fgis::api::codec {

namespace {
json optional_string(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }
}  // namespace

json to_json(const Provenance& p) {
  return json{{"source_name", p.source_name},
              {"source_format", std::string(format_name(p.source_format))},
              {"import_time", format_iso8601(p.import_time)},
              {"content_sha256", p.content_sha256},
              {"skipped_count", p.skipped_count}};
}

json to_json(const store::LayerInfo& l) {
  return json{{"layer_id", l.layer_id},
              {"label", l.label},
              {"feature_count", l.feature_count},
              {"provenance", to_json(l.provenance)}};
}

json to_json(const store::CameraHit& h) {
  return json{{"camera", to_json(h.camera)}, {"distance_m", h.distance_m}};
}

json to_json(const WifiScan& s, bool with_observations) {
  json j{{"scan_id", s.scan_id},
         {"label", s.label},
         {"captured_from", format_iso8601(s.captured_from)},
         {"captured_to", format_iso8601(s.captured_to)},
         {"observation_count", s.observations.size()}};
  if (with_observations) {
    json obs = json::array();
    for (const auto& o : s.observations) obs.push_back(to_json(o));
    j["observations"] = std::move(obs);
  }
  return j;
}

json to_json(const GpsTrack& t) {
  json pts = json::array();
  for (const auto& p : t.points) pts.push_back(to_json(p));
  return json{{"track_id", t.track_id}, {"label", t.label}, {"points", std::move(pts)}};
}

json to_json(const analysis::ScanDiff& d) {
  auto macs = [](const std::set<MacAddress>& s) {
    json a = json::array();
    for (const auto& m : s) a.push_back(m.to_string());
    return a;
  };
  json renamed = json::array();
  for (const auto& [mac, change] : d.renamed) {
    renamed.push_back(json{{"bssid", mac.to_string()},
                           {"old_ssid", optional_string(change.old_ssid)},
                           {"new_ssid", optional_string(change.new_ssid)}});
  }
  return json{{"added", macs(d.added)},
              {"removed", macs(d.removed)},
              {"renamed", std::move(renamed)},
              {"unchanged", macs(d.unchanged)}};
}

json to_json(const analysis::ObservationHit& h) {
  return json{{"scan_id", h.scan_id}, {"observation", to_json(h.observation)}};
}

json to_json(const analysis::PresenceEvidence& e) {
  return json{{"bssid", e.bssid.to_string()},
              {"position", to_json(e.position)},
              {"timestamp", format_iso8601(e.timestamp)},
              {"scan_id", e.scan_id},
              {"ssid", optional_string(e.ssid)}};
}

json to_json(const analysis::AssociationScore& s) {
  return json{{"mac", s.mac.to_string()},
              {"plate", s.plate},
              {"co_occurrences", s.co_occurrences},
              {"distinct_sensors", s.distinct_sensors},
              {"score", s.score}};
}

json to_json(const analysis::StopSegment& s) {
  return json{{"centroid", to_json(s.centroid)},
              {"start", format_iso8601(s.start)},
              {"end", format_iso8601(s.end)},
              {"dwell_s", s.dwell_s},
              {"first_index", s.first_index},
              {"last_index", s.last_index}};
}

json to_json(const std::vector<ingest::RowIssue>& issues) {
  json a = json::array();
  for (const auto& i : issues) a.push_back(json{{"row", i.row}, {"reason", i.reason}});
  return a;
}

}  // namespace fgis::api::codec
