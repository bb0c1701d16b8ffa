#include "fgis/api/service.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <vector>

#include "api/json_codec.hpp"
#include "fgis/analysis.hpp"
#include "fgis/error.hpp"
#include "fgis/ingest.hpp"
#include "fgis/tile_math.hpp"
#include "store/atomic_file.hpp"

#ifndef FGIS_VERSION
#define FGIS_VERSION "0.0.0"
#endif

namespace fgis::api {
namespace fs = std::filesystem;
using codec::json;

namespace {

constexpr std::string_view kFallbackIndex = R"(<!doctype html>
<html lang="en">
<head><meta charset="utf-8"><title>fgis</title></head>
<body>
<h1>fgis forensic GIS service</h1>
<p>The web client is not installed. Set <code>ui_root_path</code> in the service
configuration to serve it from this origin.</p>
<ul>
<li><a href="/health">/health</a></li>
<li><a href="/cases">/cases</a></li>
<li><a href="/cameras">/cameras</a></li>
<li><a href="/scans">/scans</a></li>
<li><a href="/tracks">/tracks</a></li>
</ul>
</body>
</html>
)";

Response json_response(int status, const json& body) {
  return Response{status, "application/json", body.dump()};
}

Response error_response(int status, std::string_view code, const std::string& message) {
  return json_response(status, json{{"code", code}, {"message", message}});
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownCase:
    case ErrorCode::UnknownLayer:
    case ErrorCode::UnknownCamera:
    case ErrorCode::UnknownScan:
    case ErrorCode::UnknownTrack:
    case ErrorCode::NotFound:
      return 404;
    case ErrorCode::DuplicateId:
      return 409;
    case ErrorCode::CorruptStore:
    case ErrorCode::IoError:
    case ErrorCode::MissingManifest:
    case ErrorCode::CorruptManifest:
    case ErrorCode::InvalidConfig:
    case ErrorCode::BindRefused:
      return 500;
    default:
      return 400;
  }
}

[[noreturn]] void not_found(const std::string& what) { throw Error(ErrorCode::NotFound, what); }
[[noreturn]] void bad_query(const std::string& what) { throw Error(ErrorCode::MalformedQuery, what); }

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos < path.size()) {
    if (path[pos] == '/') {
      ++pos;
      continue;
    }
    const auto next = path.find('/', pos);
    const auto end = next == std::string_view::npos ? path.size() : next;
    parts.emplace_back(path.substr(pos, end - pos));
    pos = end;
  }
  return parts;
}

bool strip_suffix(std::string& s, std::string_view suffix) {
  if (s.size() <= suffix.size() || s.compare(s.size() - suffix.size(), suffix.size(), suffix) != 0) return false;
  s.resize(s.size() - suffix.size());
  return true;
}

std::optional<std::int64_t> parse_int(std::string_view s) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<double> parse_number(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

const std::string* query_param(const Request& r, const std::string& key) {
  const auto it = r.query.find(key);
  return it == r.query.end() ? nullptr : &it->second;
}

double number_param(const Request& r, const std::string& key) {
  const auto* raw = query_param(r, key);
  if (!raw) bad_query("missing query parameter '" + key + "'");
  const auto v = parse_number(*raw);
  if (!v) bad_query("query parameter '" + key + "' is not a number");
  return *v;
}

std::optional<Timestamp> time_param(const Request& r, const std::string& key) {
  const auto* raw = query_param(r, key);
  if (!raw) return std::nullopt;
  const auto t = parse_iso8601_utc(*raw);
  if (!t) bad_query("query parameter '" + key + "' is not an ISO-8601 time with zone");
  return t;
}

json body_object(const Request& r) {
  if (r.body.find_first_not_of(" \t\r\n") == std::string::npos) return json::object();
  json j = json::parse(r.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) bad_query("request body must be a JSON object");
  return j;
}

std::string body_string(const json& body, const char* key) {
  const auto it = body.find(key);
  if (it == body.end() || !it->is_string()) bad_query(std::string("body member '") + key + "' must be a string");
  return it->get<std::string>();
}

std::optional<double> body_number(const json& body, std::initializer_list<const char*> keys) {
  for (const char* key : keys) {
    const auto it = body.find(key);
    if (it == body.end()) continue;
    if (!it->is_number()) {
      throw Error(ErrorCode::InvalidParameters, std::string("body member '") + key + "' must be a number");
    }
    return it->get<double>();
  }
  return std::nullopt;
}

std::string_view content_type_for(const fs::path& p) {
  const auto ext = p.extension().string();
  if (ext == ".html" || ext == ".htm") return "text/html; charset=utf-8";
  if (ext == ".js" || ext == ".mjs") return "text/javascript; charset=utf-8";
  if (ext == ".css") return "text/css; charset=utf-8";
  if (ext == ".json") return "application/json";
  if (ext == ".png") return "image/png";
  if (ext == ".svg") return "image/svg+xml";
  if (ext == ".ico") return "image/x-icon";
  if (ext == ".woff2") return "font/woff2";
  return "application/octet-stream";
}

}  // namespace

Service::Service(std::optional<tiles::TileArchive> tiles, std::unique_ptr<store::EvidenceStore> store,
                 ServiceOptions options)
    : tiles_(std::move(tiles)), store_(std::move(store)), options_(std::move(options)) {}

std::unique_ptr<Service> Service::from_config(const ServiceConfig& cfg) {
  auto archive = tiles::TileArchive::open(cfg.tile_archive_path, cfg.cache_capacity);
  auto store = store::EvidenceStore::open(cfg.case_root_path);
  return std::make_unique<Service>(std::move(archive), std::move(store),
                                   ServiceOptions{cfg.lenient_import, cfg.ui_root_path});
}

Response Service::handle(const Request& req) const {
  const auto seg = split_path(req.path);
  const bool get = req.method == "GET" || req.method == "HEAD";
  const bool post = req.method == "POST";
  const auto snapshot = store_->snapshot();
  const auto& snap = *snapshot;
  const std::size_t n = seg.size();

  try {
    // ---------------------------------------------------------- health
    if (get && n == 1 && seg[0] == "health") {
      const auto tile_count = tiles_ ? tiles_->manifest().tile_count : 0;
      return json_response(200, json{{"status", "ok"},
                                     {"tile_count", tile_count},
                                     {"case_count", snap.cases().size()},
                                     {"version", FGIS_VERSION}});
    }

    // ----------------------------------------------------------- tiles
    if (get && n == 4 && seg[0] == "tiles") {
      std::string y_part = seg[3];
      if (!strip_suffix(y_part, ".png")) not_found("tile paths end in .png");
      const auto z = parse_int(seg[1]);
      const auto x = parse_int(seg[2]);
      const auto y = parse_int(y_part);
      if (!z || !x || !y) bad_query("tile coordinates must be integers");
      if (!tiles_) not_found("no tile archive is configured");
      const auto& m = tiles_->manifest();
      if (*z < m.min_zoom || *z > m.max_zoom) {
        throw Error(ErrorCode::ZoomOutOfRange, "zoom " + std::to_string(*z) + " outside [" +
                                                   std::to_string(m.min_zoom) + ", " + std::to_string(m.max_zoom) + "]");
      }
      const TileCoord t{static_cast<int>(*z), *x, *y};
      const auto bytes = tiles_->get_tile(t);
      if (!bytes) not_found("tile " + t.to_string() + " is not in the archive");
      return Response{200, "image/png", *bytes};
    }

    // ----------------------------------------------------------- cases
    if (n >= 1 && seg[0] == "cases") {
      if (n == 1 && post) {
        const json body = body_object(req);
        const std::string name = body.contains("name") ? body_string(body, "name") : "";
        if (name.empty()) throw Error(ErrorCode::InvalidParameters, "a case needs a non-empty name");
        return json_response(201, codec::to_json(store_->create_case(name)));
      }
      if (n == 1 && get) {
        json list = json::array();
        for (const auto& c : snap.cases()) list.push_back(codec::to_json(c));
        return json_response(200, list);
      }
      if (n == 2 && get) return json_response(200, codec::to_json(snap.get_case(seg[1])));
      if (n == 3 && get && seg[2] == "layers") {
        json list = json::array();
        for (const auto& l : snap.list_layers(seg[1])) list.push_back(codec::to_json(l));
        return json_response(200, list);
      }
      if (n == 4 && get && seg[2] == "layers") {
        std::string lid = seg[3];
        if (!strip_suffix(lid, ".geojson")) not_found("layer documents end in .geojson");
        return Response{200, "application/geo+json", ingest::export_geojson(snap.get_layer(seg[1], lid))};
      }
      if (n == 3 && post && seg[2] == "import") return import(req, seg[1]);
    }

    // --------------------------------------------------------- cameras
    if (get && n == 1 && seg[0] == "cameras") {
      const bool any = query_param(req, "lat") || query_param(req, "lon") || query_param(req, "radius_m");
      json list = json::array();
      if (!any) {
        for (const auto& c : snap.cameras().cameras()) list.push_back(codec::to_json(c));
        return json_response(200, list);
      }
      const double lat = number_param(req, "lat");
      const double lon = number_param(req, "lon");
      const double radius = number_param(req, "radius_m");
      if (!is_valid_coordinate(lat, lon)) {
        throw Error(ErrorCode::InvalidCoordinate, "lat/lon must lie within [-90, 90] x [-180, 180]");
      }
      if (radius < 0) throw Error(ErrorCode::InvalidParameters, "radius_m must not be negative");
      std::set<CameraCategory> excluded;
      if (const auto* ex = query_param(req, "exclude")) {
        std::size_t pos = 0;
        while (pos <= ex->size()) {
          const auto comma = std::min(ex->find(',', pos), ex->size());
          const std::string item = ex->substr(pos, comma - pos);
          pos = comma + 1;
          if (item.empty()) continue;
          if (item == "unknown") {
            excluded.insert(CameraCategory::Unknown);
          } else if (auto cat = parse_category(item)) {
            excluded.insert(*cat);
          } else {
            bad_query("unknown camera category '" + item + "' in exclude");
          }
        }
      }
      for (const auto& hit : snap.query_cameras(GeoPoint(lat, lon), radius, excluded)) {
        list.push_back(codec::to_json(hit));
      }
      return json_response(200, list);
    }
    if (get && n == 2 && seg[0] == "cameras") return json_response(200, codec::to_json(snap.get_camera(seg[1])));

    // ----------------------------------------------------- scans/tracks
    if (get && n == 1 && seg[0] == "scans") {
      json list = json::array();
      for (const auto& s : snap.scans()) list.push_back(codec::to_json(s, false));
      return json_response(200, list);
    }
    if (get && n == 2 && seg[0] == "scans") return json_response(200, codec::to_json(snap.get_scan(seg[1]), true));
    if (get && n == 1 && seg[0] == "tracks") {
      json list = json::array();
      for (const auto& id : snap.track_ids()) {
        const auto& t = snap.get_track(id);
        list.push_back(json{{"track_id", t.track_id}, {"label", t.label}, {"point_count", t.points.size()}});
      }
      return json_response(200, list);
    }
    if (get && n == 2 && seg[0] == "tracks") {
      const auto& track = snap.get_track(seg[1]);
      const auto from = time_param(req, "from");
      const auto to = time_param(req, "to");
      if (!from && !to) return json_response(200, codec::to_json(track));
      const auto sliced = analysis::timeline_slice(track, from.value_or(Timestamp::min()), to.value_or(Timestamp::max()));
      return json_response(200, codec::to_json(sliced));
    }

    // -------------------------------------------------------- analysis
    if (n >= 2 && seg[0] == "analysis") {
      const std::string& op = seg[1];
      if (post && n == 2 && op == "scan-diff") {
        const json body = body_object(req);
        const auto& a = snap.get_scan(body_string(body, "scan_a"));
        const auto& b = snap.get_scan(body_string(body, "scan_b"));
        return json_response(200, codec::to_json(analysis::diff_scans(a, b)));
      }
      if (get && n == 3 && op == "bssid") {
        const auto q = analysis::parse_bssid_query(seg[2]);
        json list = json::array();
        for (const auto& hit : analysis::search_bssid(q, snap.scans())) list.push_back(codec::to_json(hit));
        return json_response(200, list);
      }
      if (post && n == 2 && op == "presence") {
        const json body = body_object(req);
        const auto it = body.find("bssids");
        if (it == body.end() || !it->is_array()) bad_query("body member 'bssids' must be an array of MAC addresses");
        std::set<MacAddress> known;
        for (const auto& v : *it) {
          const auto mac = v.is_string() ? MacAddress::parse(v.get<std::string>()) : std::nullopt;
          if (!mac) bad_query("'" + v.dump() + "' is not a MAC address");
          known.insert(*mac);
        }
        json list = json::array();
        for (const auto& e : analysis::presence_report(known, snap.scans())) list.push_back(codec::to_json(e));
        return json_response(200, list);
      }
      if (post && n == 2 && op == "correlate") {
        const json body = body_object(req);
        analysis::CorrelationParams p;
        p.max_time_gap_s = body_number(body, {"dt_s", "\xCE\x94t_s"}).value_or(p.max_time_gap_s);
        p.max_distance_m = body_number(body, {"d_m"}).value_or(p.max_distance_m);
        json list = json::array();
        for (const auto& s : analysis::correlate_bt_anpr(snap.bt_detections(), snap.anpr_detections(), p)) {
          list.push_back(codec::to_json(s));
        }
        return json_response(200, list);
      }
      if (post && n == 2 && op == "stops") {
        const json body = body_object(req);
        const auto& track = snap.get_track(body_string(body, "track_id"));
        analysis::StopParams p;
        p.radius_m = body_number(body, {"epsilon_m"}).value_or(p.radius_m);
        p.min_dwell_s = body_number(body, {"tau_s"}).value_or(p.min_dwell_s);
        json list = json::array();
        for (const auto& s : analysis::detect_stops(track, p)) list.push_back(codec::to_json(s));
        return json_response(200, list);
      }
    }

    // ----------------------------------------------------------- static
    if (get) {
      if (auto r = static_asset(req.path)) return *r;
    }
    not_found("no route for " + req.method + " " + req.path);
  } catch (const Error& e) {
    const int status = status_for(e.code());
    if (status == 500) return error_response(500, e.code_name(), "internal storage error");
    return error_response(status, e.code_name(), e.what());
  } catch (const std::exception&) {
    return error_response(500, "InternalError", "internal error");
  }
}

std::optional<Response> Service::static_asset(const std::string& path) const {
  const auto seg = split_path(path);
  if (!options_.ui_root) {
    if (seg.empty() || (seg.size() == 1 && seg[0] == "index.html")) {
      return Response{200, "text/html; charset=utf-8", std::string(kFallbackIndex)};
    }
    return std::nullopt;
  }
  fs::path file = *options_.ui_root;
  for (const auto& s : seg) {
    if (s == ".." || s == "." || s.find('\\') != std::string::npos) return std::nullopt;
    file /= s;
  }
  std::error_code ec;
  if (seg.empty() || fs::is_directory(file, ec)) file /= "index.html";
  if (!fs::is_regular_file(file, ec)) {
    if (seg.empty()) return Response{200, "text/html; charset=utf-8", std::string(kFallbackIndex)};
    return std::nullopt;
  }
  auto bytes = store::detail::read_whole_file(file);
  if (!bytes) return std::nullopt;
  return Response{200, std::string(content_type_for(file)), std::move(*bytes)};
}

Response Service::import(const Request& req, const std::string& case_id) const {
  const auto* fmt = query_param(req, "format");
  if (!fmt) bad_query("missing query parameter 'format' (gpx, kml, gml, geojson, wifi, anpr, bt, camera)");
  const std::string format = *fmt;
  const auto* label_param = query_param(req, "label");
  const std::string label = label_param && !label_param->empty() ? *label_param : format + " import";
  bool lenient = options_.lenient_import;
  if (const auto* l = query_param(req, "lenient")) {
    if (*l == "true" || *l == "1") {
      lenient = true;
    } else if (*l == "false" || *l == "0") {
      lenient = false;
    } else {
      bad_query("query parameter 'lenient' must be true or false");
    }
  }
  // Fail before parsing when the case does not exist.
  store_->snapshot()->get_case(case_id);

  const ingest::ImportContext ctx{label, std::nullopt};
  const ingest::CsvOptions csv{lenient};
  try {
    if (format == "gpx" || format == "kml" || format == "gml" || format == "geojson") {
      FeatureSet fs = format == "gpx"   ? ingest::parse_gpx(req.body, ctx)
                      : format == "kml" ? ingest::parse_kml(req.body, ctx)
                      : format == "gml" ? ingest::parse_gml(req.body, ctx)
                                        : ingest::parse_geojson(req.body, ctx);
      json result{{"feature_count", fs.features.size()}, {"skipped_count", fs.provenance.skipped_count}};
      result["layer_id"] = store_->add_layer(case_id, fs, label);
      if (format == "gpx") {
        auto extraction = ingest::tracks_from_features(fs);
        json ids = json::array();
        std::size_t k = 0;
        for (auto& t : extraction.tracks) {
          t.label = extraction.tracks.size() == 1 ? label : label + " #" + std::to_string(++k);
          ids.push_back(store_->store_track(case_id, std::move(t)));
        }
        result["track_ids"] = std::move(ids);
      }
      return json_response(201, result);
    }
    if (format == "wifi") {
      auto imp = ingest::parse_wifi_csv(req.body, csv, ctx);
      const auto count = imp.value.observations.size();
      const auto scan_id = store_->store_scan(case_id, std::move(imp.value));
      return json_response(201, json{{"scan_id", scan_id},
                                     {"observation_count", count},
                                     {"skipped_rows", codec::to_json(imp.skipped)}});
    }
    if (format == "bt") {
      auto imp = ingest::parse_bt_csv(req.body, csv);
      const auto count = store_->store_bt_detections(case_id, imp.value);
      return json_response(201, json{{"count", count}, {"skipped_rows", codec::to_json(imp.skipped)}});
    }
    if (format == "anpr") {
      auto imp = ingest::parse_anpr_csv(req.body, csv);
      const auto count = store_->store_anpr_detections(case_id, imp.value);
      return json_response(201, json{{"count", count}, {"skipped_rows", codec::to_json(imp.skipped)}});
    }
    if (format == "camera") {
      auto imp = ingest::parse_camera_csv(req.body, csv, ctx);
      const auto count = store_->upsert_cameras(imp.value);
      return json_response(201, json{{"count", count}, {"skipped_rows", codec::to_json(imp.skipped)}});
    }
  } catch (const Error& e) {
    if (status_for(e.code()) == 400) throw Error(e.code(), format + " import: " + e.what());
    throw;
  }
  bad_query("unknown import format '" + format + "' (gpx, kml, gml, geojson, wifi, anpr, bt, camera)");
}

}  // namespace fgis::api
