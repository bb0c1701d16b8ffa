#include "store/record_codec.hpp"

#include "fgis/error.hpp"

namespace fgis::codec {

namespace {

[[noreturn]] void bad(const std::string& what) {
  throw Error(ErrorCode::CorruptStore, "stored record: " + what);
}

const json& member(const json& j, const char* field) {
  if (!j.is_object()) bad("expected an object");
  const auto it = j.find(field);
  if (it == j.end()) bad(std::string("missing '") + field + "'");
  return *it;
}

std::string string_member(const json& j, const char* field) {
  const json& v = member(j, field);
  if (!v.is_string()) bad(std::string("'") + field + "' is not a string");
  return v.get<std::string>();
}

double number_member(const json& j, const char* field) {
  const json& v = member(j, field);
  if (!v.is_number()) bad(std::string("'") + field + "' is not a number");
  return v.get<double>();
}

MacAddress mac_member(const json& j, const char* field) {
  const auto mac = MacAddress::parse(string_member(j, field));
  if (!mac) bad(std::string("'") + field + "' is not a MAC address");
  return *mac;
}

void put_point(json& j, const GeoPoint& p) { j["position"] = to_json(p); }

GeoPoint position_member(const json& j) { return point_from_json(member(j, "position")); }

}  // namespace

json to_json(const GeoPoint& p) { return json{{"lat", p.lat()}, {"lon", p.lon()}}; }

json to_json(const CameraRecord& c) {
  json j;
  j["camera_id"] = c.camera_id;
  put_point(j, c.position);
  j["category"] = std::string(category_name(c.category));
  j["owner_contact"] = c.owner_contact;
  j["description"] = c.description;
  j["source"] = c.source;
  j["tags"] = c.tags;
  return j;
}

json to_json(const WifiObservation& o) {
  json j;
  j["bssid"] = o.bssid.to_string();
  j["ssid"] = o.ssid ? json(*o.ssid) : json(nullptr);
  put_point(j, o.position);
  j["timestamp"] = format_iso8601(o.timestamp);
  j["signal_dbm"] = o.signal_dbm ? json(*o.signal_dbm) : json(nullptr);
  return j;
}

json to_json(const TrackPoint& p) {
  json j;
  put_point(j, p.position);
  j["timestamp"] = format_iso8601(p.timestamp);
  return j;
}

json to_json(const BtDetection& d) {
  json j;
  j["mac"] = d.mac.to_string();
  j["sensor_id"] = d.sensor_id;
  put_point(j, d.position);
  j["timestamp"] = format_iso8601(d.timestamp);
  return j;
}

json to_json(const AnprDetection& d) {
  json j;
  j["plate"] = d.plate;
  j["sensor_id"] = d.sensor_id;
  put_point(j, d.position);
  j["timestamp"] = format_iso8601(d.timestamp);
  return j;
}

json to_json(const store::CaseRecord& c) {
  json j;
  j["case_id"] = c.case_id;
  j["name"] = c.name;
  j["created_at"] = format_iso8601(c.created_at);
  j["layer_ids"] = c.layer_ids;
  j["scan_ids"] = c.scan_ids;
  j["track_ids"] = c.track_ids;
  return j;
}

Timestamp time_from_json(const json& j, const char* field) {
  const auto t = parse_iso8601_utc(string_member(j, field));
  if (!t) bad(std::string("'") + field + "' is not an ISO-8601 time");
  return *t;
}

GeoPoint point_from_json(const json& j) {
  const double lat = number_member(j, "lat");
  const double lon = number_member(j, "lon");
  if (!is_valid_coordinate(lat, lon)) bad("coordinate out of range");
  return GeoPoint(lat, lon);
}

CameraRecord camera_from_json(const json& j) {
  CameraRecord c;
  c.camera_id = string_member(j, "camera_id");
  c.position = position_member(j);
  const auto cat = string_member(j, "category");
  if (cat == "unknown") {
    c.category = CameraCategory::Unknown;
  } else if (auto parsed = parse_category(cat)) {
    c.category = *parsed;
  } else {
    bad("unknown camera category '" + cat + "'");
  }
  c.owner_contact = string_member(j, "owner_contact");
  c.description = string_member(j, "description");
  c.source = string_member(j, "source");
  const json& tags = member(j, "tags");
  if (!tags.is_array()) bad("'tags' is not an array");
  for (const auto& t : tags) {
    if (!t.is_string()) bad("tag is not a string");
    c.tags.push_back(t.get<std::string>());
  }
  return c;
}

WifiObservation observation_from_json(const json& j) {
  WifiObservation o;
  o.bssid = mac_member(j, "bssid");
  const json& ssid = member(j, "ssid");
  if (ssid.is_string()) {
    o.ssid = ssid.get<std::string>();
  } else if (!ssid.is_null()) {
    bad("'ssid' is neither a string nor null");
  }
  o.position = position_member(j);
  o.timestamp = time_from_json(j, "timestamp");
  const json& sig = member(j, "signal_dbm");
  if (sig.is_number_integer()) {
    o.signal_dbm = sig.get<int>();
  } else if (!sig.is_null()) {
    bad("'signal_dbm' is neither an integer nor null");
  }
  return o;
}

TrackPoint track_point_from_json(const json& j) {
  return TrackPoint{position_member(j), time_from_json(j, "timestamp")};
}

BtDetection bt_from_json(const json& j) {
  return BtDetection{mac_member(j, "mac"), string_member(j, "sensor_id"), position_member(j),
                     time_from_json(j, "timestamp")};
}

AnprDetection anpr_from_json(const json& j) {
  return AnprDetection{string_member(j, "plate"), string_member(j, "sensor_id"), position_member(j),
                       time_from_json(j, "timestamp")};
}

}  // namespace fgis::codec
