// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all pass.
#include <httplib.h>
#include <signal.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <thread>

#include "fgis/analysis.hpp"
#include "fgis/api/server.hpp"
#include "fgis/api/service.hpp"
#include "fgis/error.hpp"
#include "fgis/ingest.hpp"
#include "fgis/synthetic.hpp"
#include "fgis/tile_math.hpp"
#include "test_support.hpp"

using namespace fgis;
using nlohmann::json;
using fgis::test::fixture;
using fgis::test::Gen;
using fgis::test::slurp;
using fgis::test::TempDir;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond && pass) detail << "first failure: " << what << "; ";
    pass = pass && cond;
  }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

// In-process HTTP server over a Service, on an ephemeral loopback port.
class LiveServer {
 public:
  explicit LiveServer(const api::Service& svc) : server_(svc) {
    port_ = server_.bind("127.0.0.1", 0, false);
    thread_ = std::thread([this] { server_.run(); });
  }
  ~LiveServer() {
    server_.stop();
    thread_.join();
  }
  int port() const { return port_; }

 private:
  api::Server server_;
  int port_ = 0;
  std::thread thread_;
};

struct HttpResult {
  int status = 0;
  std::string content_type;
  std::string body;
};

class Http {
 public:
  explicit Http(int port) : cli_("127.0.0.1", port) {
    cli_.set_keep_alive(true);
    cli_.set_tcp_nodelay(true);
  }

  HttpResult get(const std::string& path) {
    return convert(cli_.Get(path));
  }
  HttpResult post(const std::string& path, const std::string& body, const std::string& type = "application/json") {
    return convert(cli_.Post(path, body, type));
  }

 private:
  static HttpResult convert(const httplib::Result& r) {
    if (!r) return {};
    return {r->status, r->get_header_value("Content-Type"), r->body};
  }
  httplib::Client cli_;
};

std::string query_string(std::initializer_list<std::pair<std::string, std::string>> kv) {
  std::string q;
  for (const auto& [k, v] : kv) {
    q += q.empty() ? "?" : "&";
    q += k + "=" + httplib::detail::encode_query_param(v);
  }
  return q;
}

// ------------------------------------------------------------------ tiles

Outcome tile_math() {
  Outcome o;
  const auto t0 = Clock::now();
  Gen g(101);
  std::size_t failures = 0;
  for (int i = 0; i < 10000; ++i) {
    const int z = static_cast<int>(g.integer(0, 14));
    const GeoPoint p(g.uniform(-kMaxMercatorLatitude, kMaxMercatorLatitude), g.uniform(-180.0, 180.0));
    const auto t = point_to_tile(p, z);
    if (!t.valid() || !tile_to_bbox(t).contains(p)) ++failures;
  }
  o.require(failures == 0, std::to_string(failures) + " round-trip failures");
  o.require(point_to_tile({0, 0}, 1) == TileCoord{1, 1, 1}, "(0,0) z=1");
  bool z0 = true;
  for (int i = 0; i < 100; ++i) {
    z0 = z0 && point_to_tile({g.uniform(-85, 85), g.uniform(-180, 180)}, 0) == TileCoord{0, 0, 0};
  }
  o.require(z0, "z=0 single tile");
  // Independent-script oracle.
  o.require(point_to_tile({52.0800, 4.3250}, 12) == TileCoord{12, 2097, 1351}, "The Hague z=12");
  const double secs = seconds_since(t0);
  o.require(secs < 5.0, "runtime");
  o.detail << "10000 cases, 3 fixtures, " << secs << " s";
  return o;
}

Outcome tile_serving() {
  Outcome o;
  // sha256sum of the fixture files.
  const std::vector<std::pair<std::string, std::string>> expected = {
      {"/tiles/0/0/0.png", "e025eed32eaa0400e7a5c5e5fa412ada1b6605b5769659b1729bb6e97574cc8d"},
      {"/tiles/1/1/1.png", "0ef183d7c3a65681e3879801d85ec0cca3f22a0f0e5c6967a1d2b52e38d9da13"},
      {"/tiles/2/2/1.png", "0711730e3e90ba0a38fb3437fe85ca879031c33b54d6af93c608e40e51d094dd"},
  };
  TempDir dir;
  const api::Service cached(tiles::TileArchive::open(fixture("tiles"), 2), store::EvidenceStore::open(dir / "a"));
  const api::Service uncached(tiles::TileArchive::open(fixture("tiles"), 0), store::EvidenceStore::open(dir / "b"));
  LiveServer s1(cached);
  LiveServer s2(uncached);
  Http h1(s1.port());
  Http h2(s2.port());
  for (const auto& [path, hash] : expected) {
    const auto r = h1.get(path);
    o.require(r.status == 200 && r.content_type == "image/png", path + " status");
    o.require(ingest::sha256_hex(r.body) == hash, path + " hash");
  }
  Gen g(102);
  std::size_t mismatches = 0;
  std::size_t hits = 0;
  for (int i = 0; i < 1000; ++i) {
    const int z = static_cast<int>(g.integer(-1, 3));
    const std::int64_t n = std::int64_t{1} << std::max(z, 0);
    const auto path = "/tiles/" + std::to_string(z) + "/" + std::to_string(g.integer(0, n)) + "/" +
                      std::to_string(g.integer(0, n)) + ".png";
    const auto a = h1.get(path);
    const auto b = h2.get(path);
    if (a.status != b.status || a.body != b.body || a.content_type != b.content_type || a.status == 0) ++mismatches;
    if (a.status == 200) ++hits;
  }
  o.require(mismatches == 0, std::to_string(mismatches) + " cache-on/off mismatches");
  o.require(cached.tiles()->cache_stats().resident <= 2, "cache bound");
  o.detail << "3 fixture hashes, 1000 requests (" << hits << " tiles served), cache hits "
           << cached.tiles()->cache_stats().hits;
  return o;
}

// ---------------------------------------------------------------- cameras

Outcome radius_query() {
  Outcome o;
  const auto t0 = Clock::now();
  TempDir dir;
  auto store = store::EvidenceStore::open(dir / "store");
  Gen g(103);
  std::vector<CameraRecord> cams;
  for (int i = 0; i < 10000; ++i) {
    CameraRecord c;
    c.camera_id = "cam-" + std::to_string(i);
    c.position = GeoPoint(52.0705 + g.uniform(-0.1, 0.1), 4.3007 + g.uniform(-0.15, 0.15));
    if (i > 0 && g.chance(0.02)) c.position = cams[g.integer(0, i - 1)].position;  // exact ties
    c.category = static_cast<CameraCategory>(g.integer(0, 2));
    cams.push_back(c);
  }
  store->upsert_cameras(cams);
  const api::Service svc(std::nullopt, std::move(store));
  LiveServer server(svc);
  Http http(server.port());

  std::size_t agree = 0;
  std::size_t total_hits = 0;
  for (int q = 0; q < 100; ++q) {
    const GeoPoint c = g.chance(0.1) ? cams[g.integer(0, 9999)].position
                                     : GeoPoint(52.0705 + g.uniform(-0.1, 0.1), 4.3007 + g.uniform(-0.15, 0.15));
    const double r = g.chance(0.1) ? 0.0 : g.uniform(0, 3000);
    std::set<CameraCategory> ex;
    std::string exclude;
    if (g.chance(0.3)) {
      ex.insert(CameraCategory::Private);
      exclude = "private";
    }
    if (g.chance(0.2)) {
      ex.insert(CameraCategory::Unknown);
      exclude += exclude.empty() ? "unknown" : ",unknown";
    }
    std::vector<std::pair<double, std::string>> oracle;
    for (const auto& cam : cams) {
      const double d = haversine_distance(cam.position, c);
      if (d <= r && !ex.count(cam.category)) oracle.emplace_back(d, cam.camera_id);
    }
    std::sort(oracle.begin(), oracle.end());

    char lat[64], lon[64], rad[64];
    std::snprintf(lat, sizeof lat, "%.17g", c.lat());
    std::snprintf(lon, sizeof lon, "%.17g", c.lon());
    std::snprintf(rad, sizeof rad, "%.17g", r);
    const auto res = http.get("/cameras" + query_string({{"lat", lat}, {"lon", lon}, {"radius_m", rad}, {"exclude", exclude}}));
    if (res.status != 200) continue;
    const auto body = json::parse(res.body);
    bool same = body.size() == oracle.size();
    for (std::size_t i = 0; same && i < oracle.size(); ++i) {
      same = body[i]["camera"]["camera_id"] == oracle[i].second && body[i]["distance_m"].get<double>() == oracle[i].first;
    }
    agree += same;
    total_hits += oracle.size();
  }
  const double secs = seconds_since(t0);
  o.require(agree == 100, std::to_string(100 - agree) + " queries disagree");
  o.require(secs < 10.0, "runtime");
  o.detail << agree << "/100 queries identical to brute force (" << total_hits << " hits), " << secs << " s";
  return o;
}

// ---------------------------------------------------------------- parsers

int fuzz_child() {
  const std::vector<std::pair<std::string, std::string>> seeds = {
      {"gpx", slurp(fixture("geodata/golden.gpx"))},   {"kml", slurp(fixture("geodata/golden.kml"))},
      {"gml", slurp(fixture("geodata/golden.gml"))},   {"geojson", slurp(fixture("geodata/golden.geojson"))},
      {"wifi", slurp(fixture("csv/wifi_scan.csv"))},   {"anpr", slurp(fixture("csv/anpr.csv"))},
      {"bt", slurp(fixture("csv/bt.csv"))},            {"camera", slurp(fixture("csv/cameras.csv"))}};
  Gen g(104);
  int unexpected = 0;
  for (int i = 0; i < 10000; ++i) {
    const auto& [kind, seed] = seeds[static_cast<std::size_t>(i) % seeds.size()];
    std::string s = seed;
    if (g.chance(0.1)) {
      s.resize(static_cast<std::size_t>(g.integer(0, 512)));
      for (auto& ch : s) ch = static_cast<char>(g.integer(0, 255));
    } else {
      for (int k = 0, n = static_cast<int>(g.integer(1, 10)); k < n && !s.empty(); ++k) {
        const auto pos = static_cast<std::size_t>(g.integer(0, static_cast<std::int64_t>(s.size()) - 1));
        switch (g.integer(0, 3)) {
          case 0: s[pos] = static_cast<char>(g.integer(0, 255)); break;
          case 1: s.erase(pos, static_cast<std::size_t>(g.integer(1, 32))); break;
          case 2: s.insert(pos, s.substr(pos / 2, static_cast<std::size_t>(g.integer(1, 64)))); break;
          default: s.insert(pos, 1, "<>\"',;{}[]:-.0123456789"[g.integer(0, 21)]); break;
        }
      }
    }
    const ingest::CsvOptions lenient{g.chance(0.5)};
    try {
      if (kind == "gpx") ingest::parse_gpx(s);
      if (kind == "kml") ingest::parse_kml(s);
      if (kind == "gml") ingest::parse_gml(s);
      if (kind == "geojson") ingest::parse_geojson(s);
      if (kind == "wifi") ingest::parse_wifi_csv(s, lenient);
      if (kind == "anpr") ingest::parse_anpr_csv(s, lenient);
      if (kind == "bt") ingest::parse_bt_csv(s, lenient);
      if (kind == "camera") ingest::parse_camera_csv(s, lenient);
    } catch (const Error&) {
    } catch (...) {
      ++unexpected;
    }
  }
  return unexpected == 0 ? 0 : 1;
}

Outcome parser_corpus() {
  Outcome o;
  const auto gpx = ingest::parse_gpx(slurp(fixture("geodata/axis_point.gpx")));
  const auto kml = ingest::parse_kml(slurp(fixture("geodata/axis_point.kml")));
  const auto gml = ingest::parse_gml(slurp(fixture("geodata/axis_point.gml")));
  const auto geo = ingest::parse_geojson(slurp(fixture("geodata/axis_point.geojson")));
  bool same = true;
  for (const auto* fs : {&gpx, &kml, &gml, &geo}) {
    same = same && fs->features.size() == 1 && std::get<GeoPoint>(fs->features[0].geometry) == GeoPoint(52.08, 4.325);
  }
  o.require(same, "axis-order fixture");

  double worst = 0.0;
  std::size_t files = 0;
  for (const auto* name : {"golden.gpx", "golden.kml", "golden.gml", "golden.geojson"}) {
    const std::string n = name;
    const auto bytes = slurp(fixture("geodata/" + n));
    const FeatureSet fs = n.ends_with(".gpx")   ? ingest::parse_gpx(bytes)
                          : n.ends_with(".kml") ? ingest::parse_kml(bytes)
                          : n.ends_with(".gml") ? ingest::parse_gml(bytes)
                                                : ingest::parse_geojson(bytes);
    const auto back = ingest::parse_geojson(ingest::export_geojson(fs));
    o.require(back.features.size() == fs.features.size() && point_count(back) == point_count(fs), n + " counts");
    for (std::size_t i = 0; i < std::min(back.features.size(), fs.features.size()); ++i) {
      auto pts = [](const Feature& f) {
        if (const auto* p = std::get_if<GeoPoint>(&f.geometry)) return std::vector<GeoPoint>{*p};
        return std::get<LineString>(f.geometry).points;
      };
      const auto a = pts(fs.features[i]);
      const auto b = pts(back.features[i]);
      o.require(a.size() == b.size(), n + " geometry size");
      for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k) {
        worst = std::max({worst, std::abs(a[k].lat() - b[k].lat()), std::abs(a[k].lon() - b[k].lon())});
      }
    }
    ++files;
  }
  o.require(worst <= 1e-7, "round-trip error");

  // Fuzz in a child so that a crash is observed instead of ending the suite.
  std::fflush(nullptr);
  const pid_t pid = fork();
  if (pid == 0) _exit(fuzz_child());
  int status = 0;
  waitpid(pid, &status, 0);
  const bool clean = WIFEXITED(status) && WEXITSTATUS(status) == 0;
  o.require(clean, WIFSIGNALED(status) ? "fuzz child killed by signal " + std::to_string(WTERMSIG(status))
                                       : "fuzz child saw non-fgis exceptions");
  o.detail << "4-way point identical, " << files << " golden files max error " << worst
           << " deg, 10000 fuzz inputs " << (clean ? "without faults" : "FAULTED");
  return o;
}

// -------------------------------------------------------------- scan diff

MacAddress small_mac(std::uint8_t v) { return MacAddress({0xAA, 0xBB, 0xCC, 0, 0, v}); }

analysis::ScanDiff oracle_diff(const WifiScan& a, const WifiScan& b) {
  auto latest = [](const WifiScan& s) {
    std::map<MacAddress, std::pair<Timestamp, std::optional<std::string>>> m;
    for (const auto& x : s.observations) {
      auto it = m.find(x.bssid);
      if (it == m.end() || x.timestamp >= it->second.first) m[x.bssid] = {x.timestamp, x.ssid};
    }
    return m;
  };
  const auto la = latest(a);
  const auto lb = latest(b);
  analysis::ScanDiff d;
  for (const auto& [k, v] : la) {
    const auto it = lb.find(k);
    if (it == lb.end()) d.removed.insert(k);
    else if (it->second.second == v.second) d.unchanged.insert(k);
    else d.renamed[k] = {v.second, it->second.second};
  }
  for (const auto& [k, v] : lb) {
    if (!la.count(k)) d.added.insert(k);
  }
  return d;
}

WifiScan make_scan(std::vector<std::pair<std::uint8_t, std::optional<std::string>>> rows, int t_offset = 0) {
  WifiScan s;
  int t = t_offset;
  for (const auto& [m, ssid] : rows) {
    s.observations.push_back({small_mac(m), ssid, GeoPoint(52.08, 4.325),
                              *parse_iso8601_utc("2016-05-01T12:00:00Z") + std::chrono::seconds(t++), std::nullopt});
  }
  s.derive_capture_range();
  return s;
}

Outcome scan_diff() {
  Outcome o;
  Gen g(105);
  static const std::vector<std::optional<std::string>> names = {std::nullopt, "home", "cafe", "shop"};
  int trials = 0;
  for (; trials < 1000; ++trials) {
    auto random_scan = [&] {
      std::vector<std::pair<std::uint8_t, std::optional<std::string>>> rows;
      for (int i = 0, n = static_cast<int>(g.integer(0, 25)); i < n; ++i) {
        rows.emplace_back(static_cast<std::uint8_t>(g.integer(0, 15)), names[g.integer(0, 3)]);
      }
      auto s = make_scan(rows);
      std::shuffle(s.observations.begin(), s.observations.end(), g.engine());
      return s;
    };
    const auto a = random_scan();
    const auto b = random_scan();
    const auto ab = analysis::diff_scans(a, b);
    const auto ba = analysis::diff_scans(b, a);
    std::set<MacAddress> all;
    for (const auto& x : a.observations) all.insert(x.bssid);
    for (const auto& x : b.observations) all.insert(x.bssid);
    std::multiset<MacAddress> parts(ab.added.begin(), ab.added.end());
    parts.insert(ab.removed.begin(), ab.removed.end());
    parts.insert(ab.unchanged.begin(), ab.unchanged.end());
    for (const auto& [k, v] : ab.renamed) parts.insert(k);
    bool ok = parts.size() == all.size() && std::set<MacAddress>(parts.begin(), parts.end()) == all;
    ok = ok && ab.added == ba.removed && ab.removed == ba.added && ab.unchanged == ba.unchanged &&
         ab.renamed.size() == ba.renamed.size();
    for (const auto& [k, v] : ab.renamed) {
      const auto it = ba.renamed.find(k);
      ok = ok && it != ba.renamed.end() && it->second.old_ssid == v.new_ssid && it->second.new_ssid == v.old_ssid;
    }
    ok = ok && ab == oracle_diff(a, b);
    if (!ok) break;
  }
  o.require(trials == 1000, "property trial " + std::to_string(trials));

  const auto a = make_scan({{1, "home"}, {2, "cafe"}});
  const auto b = make_scan({{1, "home"}, {3, "shop"}});
  const auto identity = analysis::diff_scans(a, a);
  o.require(identity == oracle_diff(a, a) && identity.unchanged.size() == 2 && identity.added.empty(), "identity fixture");
  const auto added_removed = analysis::diff_scans(a, b);
  o.require(added_removed == oracle_diff(a, b) && added_removed.added == std::set<MacAddress>{small_mac(3)} &&
                added_removed.removed == std::set<MacAddress>{small_mac(2)} &&
                added_removed.unchanged == std::set<MacAddress>{small_mac(1)},
            "added/removed fixture");
  const auto r1 = make_scan({{1, "home"}});
  const auto r2 = make_scan({{1, "office"}});
  const auto renamed = analysis::diff_scans(r1, r2);
  o.require(renamed == oracle_diff(r1, r2) && renamed.renamed.size() == 1 &&
                renamed.renamed.begin()->second == analysis::SsidChange{"home", "office"},
            "renamed fixture");
  o.detail << trials << " randomized trials, 3 fixtures";
  return o;
}

// ------------------------------------------------------------ correlation

std::vector<analysis::AssociationScore> exhaustive_ranking(const std::vector<BtDetection>& bt,
                                                           const std::vector<AnprDetection>& anpr,
                                                           const analysis::CorrelationParams& p) {
  std::map<MacAddress, std::vector<const BtDetection*>> by_mac;
  std::map<std::string, std::vector<const AnprDetection*>> by_plate;
  for (const auto& d : bt) by_mac[d.mac].push_back(&d);
  for (const auto& d : anpr) by_plate[d.plate].push_back(&d);
  std::vector<analysis::AssociationScore> out;
  for (const auto& [mac, bds] : by_mac) {
    for (const auto& [plate, ads] : by_plate) {
      std::size_t co = 0;
      std::set<std::string> sensors;
      for (const auto* b : bds) {
        for (const auto* a : ads) {
          if (std::abs(seconds_between(b->timestamp, a->timestamp)) <= p.max_time_gap_s &&
              haversine_distance(b->position, a->position) <= p.max_distance_m) {
            ++co;
            sensors.insert(b->sensor_id);
            break;
          }
        }
      }
      if (co > 0) out.push_back({mac, plate, co, sensors.size(), static_cast<double>(co * sensors.size())});
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    if (x.score != y.score) return x.score > y.score;
    if (x.co_occurrences != y.co_occurrences) return x.co_occurrences > y.co_occurrences;
    if (x.mac != y.mac) return x.mac < y.mac;
    return x.plate < y.plate;
  });
  return out;
}

Outcome correlation() {
  Outcome o;
  const auto t0 = Clock::now();
  int ranked_first = 0;
  int oracle_agree = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    auto spec = synth::default_spec(seed);
    spec.bt_p = 0.42;
    spec.n_noise_vehicles = 500;
    spec.planted_pair->n_sensors = 5;
    spec.track_profile.reset();
    const auto data = synth::generate(spec);
    const auto truth = json::parse(data.at("truth.json"));
    const auto bt = ingest::parse_bt_csv(data.at("bt.csv")).value;
    const auto anpr = ingest::parse_anpr_csv(data.at("anpr.csv")).value;
    const analysis::CorrelationParams params;
    const auto ranking = analysis::correlate_bt_anpr(bt, anpr, params);
    if (!ranking.empty() && ranking[0].mac.to_string() == truth["planted_pair"]["mac"] &&
        ranking[0].plate == truth["planted_pair"]["plate"]) {
      ++ranked_first;
    }
    if (ranking == exhaustive_ranking(bt, anpr, params)) ++oracle_agree;
  }
  const double secs = seconds_since(t0);
  o.require(ranked_first >= 95, "planted pair ranked first in " + std::to_string(ranked_first) + " seeds");
  o.require(oracle_agree == 100, "exhaustive enumeration disagrees on " + std::to_string(100 - oracle_agree) + " seeds");
  o.require(secs < 60.0, "runtime");
  o.detail << "planted pair #1 in " << ranked_first << "/100 seeds, exhaustive check " << oracle_agree << "/100, "
           << secs << " s";
  return o;
}

// ------------------------------------------------------------------ stops

GeoPoint offset(Gen& g, const GeoPoint& from, double min_m, double max_m) {
  const double d = g.uniform(min_m, max_m);
  const double bearing = g.uniform(0, 2 * M_PI);
  const double dlat = d * std::cos(bearing) / 111195.0;
  const double dlon = d * std::sin(bearing) / (111195.0 * std::cos(from.lat() * M_PI / 180.0));
  return GeoPoint(from.lat() + dlat, from.lon() + dlon);
}

Outcome stop_detection() {
  Outcome o;
  const analysis::StopParams params;  // 50 m, 300 s
  Gen g(106);
  std::size_t true_stops = 0;
  std::size_t recovered = 0;
  std::size_t extra = 0;
  double worst_error = 0.0;
  std::size_t moving_spurious = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    auto spec = synth::default_spec(seed);
    spec.planted_pair.reset();
    spec.n_noise_vehicles = 0;
    spec.n_cameras = 0;
    spec.n_scan_networks = 0;
    synth::TrackProfile tp = *spec.track_profile;
    tp.speed_mps = g.uniform(12, 25);
    tp.sample_interval_s = std::vector<double>{5, 10, 15}[g.integer(0, 2)];
    tp.stops.clear();
    GeoPoint here = tp.start;
    for (int k = 0, n = static_cast<int>(g.integer(1, 4)); k < n; ++k) {
      here = offset(g, here, 1000, 3000);
      const bool turning_point = g.chance(0.2);
      tp.stops.push_back({here, turning_point ? 0.0 : g.uniform(params.min_dwell_s + tp.sample_interval_s, 1800)});
    }
    tp.end = offset(g, here, 1000, 3000);
    spec.track_profile = tp;

    const auto data = synth::generate(spec);
    const auto truth = json::parse(data.at("truth.json"));
    const double interval = truth["sample_interval_s"].get<double>();
    const auto track = ingest::tracks_from_features(ingest::parse_gpx(data.at("track.gpx"))).tracks.at(0);
    const auto found = analysis::detect_stops(track, params);
    std::vector<bool> matched(found.size(), false);
    for (const auto& ts : truth["stops"]) {
      if (ts["dwell_s"].get<double>() < params.min_dwell_s + interval) continue;
      ++true_stops;
      const auto start = *parse_iso8601_utc(ts["start"].get<std::string>());
      const auto end = *parse_iso8601_utc(ts["end"].get<std::string>());
      const GeoPoint where(ts["lat"].get<double>(), ts["lon"].get<double>());
      for (std::size_t i = 0; i < found.size(); ++i) {
        if (matched[i] || found[i].end < start || found[i].start > end) continue;
        const double err = std::abs(found[i].dwell_s - ts["dwell_s"].get<double>());
        if (err <= interval && haversine_distance(found[i].centroid, where) <= params.radius_m) {
          matched[i] = true;
          ++recovered;
          worst_error = std::max(worst_error, err);
          break;
        }
      }
    }
    extra += static_cast<std::size_t>(std::count(matched.begin(), matched.end(), false));

    // Constant motion: same route shape, no dwell anywhere.
    auto moving = spec;
    moving.seed = seed + 1000;
    moving.track_profile->stops.clear();
    moving.track_profile->end = offset(g, tp.start, 3000, 12000);
    const auto mdata = synth::generate(moving);
    const auto mtrack = ingest::tracks_from_features(ingest::parse_gpx(mdata.at("track.gpx"))).tracks.at(0);
    moving_spurious += analysis::detect_stops(mtrack, params).size();
  }
  o.require(recovered == true_stops, std::to_string(true_stops - recovered) + " true stops missed");
  o.require(moving_spurious == 0, std::to_string(moving_spurious) + " spurious stops on constant-motion tracks");
  o.detail << recovered << "/" << true_stops << " true stops recovered (max dwell error " << worst_error
           << " s), " << extra << " unmatched detections on stop tracks, " << moving_spurious
           << " stops on 100 constant-motion tracks";
  return o;
}

// ---------------------------------------------------------------- offline

struct Child {
  pid_t pid = -1;
  int out_fd = -1;
};

Child spawn_server(const std::vector<std::string>& argv, const std::vector<std::string>& extra_env) {
  int pipefd[2];
  if (pipe(pipefd) != 0) return {};
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, pipefd[1], 1);
  posix_spawn_file_actions_addclose(&actions, pipefd[0]);
  std::vector<char*> args;
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);
  std::vector<std::string> env_store;
  for (char** e = environ; *e; ++e) env_store.emplace_back(*e);
  env_store.insert(env_store.end(), extra_env.begin(), extra_env.end());
  std::vector<char*> env;
  for (auto& e : env_store) env.push_back(e.data());
  env.push_back(nullptr);
  Child c;
  if (posix_spawn(&c.pid, args[0], &actions, nullptr, args.data(), env.data()) != 0) c.pid = -1;
  posix_spawn_file_actions_destroy(&actions);
  close(pipefd[1]);
  c.out_fd = pipefd[0];
  return c;
}

std::string read_line(int fd) {
  std::string line;
  char ch;
  while (read(fd, &ch, 1) == 1 && ch != '\n') line += ch;
  return line;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) {
    if (!l.empty()) out.push_back(l);
  }
  return out;
}

// Exercised under the monitor to show it catches what it should.
int netwatch_probe() {
  addrinfo* res = nullptr;
  if (getaddrinfo("fgis-probe.invalid", "80", nullptr, &res) == 0) freeaddrinfo(res);
  const int fd = socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in sa{};
  sa.sin_family = AF_INET;
  sa.sin_port = htons(9);
  sa.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  connect(fd, reinterpret_cast<sockaddr*>(&sa), sizeof sa);
  close(fd);
  return 0;
}

Outcome offline_guarantee(const std::string& self) {
  Outcome o;
  TempDir dir;
  const auto log = (dir / "netwatch.log").string();
  const std::string preload = std::string("LD_PRELOAD=") + FGIS_NETWATCH;

  // 1. The monitor sees DNS and outbound connects.
  const auto probe_log = (dir / "probe.log").string();
  fgis::test::run_process({self, "--netwatch-probe"}, {preload, "FGIS_NETWATCH_LOG=" + probe_log});
  const auto probe = slurp(probe_log);
  o.require(probe.find("dns getaddrinfo fgis-probe.invalid") != std::string::npos &&
                probe.find("connect 127.0.0.1:9") != std::string::npos,
            "monitor self-test");

  // 2. A full API session against the real server under the monitor.
  fs::create_directories(dir / "cases");
  auto child = spawn_server({FGIS_BINARY, "serve", "--bind", "127.0.0.1", "--port", "0", "--tiles",
                             fixture("tiles").string(), "--cases", (dir / "cases").string()},
                            {preload, "FGIS_NETWATCH_LOG=" + log});
  o.require(child.pid > 0, "spawn server");
  if (child.pid <= 0) return o;
  const auto banner = read_line(child.out_fd);
  int port = 0;
  const auto pos = banner.find(" port ");
  if (pos != std::string::npos) port = std::atoi(banner.c_str() + pos + 6);
  o.require(banner.rfind("fgis listening on 127.0.0.1", 0) == 0 && port > 0, "banner '" + banner + "'");

  std::size_t calls = 0;
  std::size_t unexpected = 0;
  if (port > 0) {
    Http http(port);
    auto expect = [&](const HttpResult& r, int status) {
      ++calls;
      if (r.status != status) {
        ++unexpected;
        o.require(false, "HTTP status " + std::to_string(r.status) + " != " + std::to_string(status));
      }
      return r;
    };
    expect(http.get("/health"), 200);
    expect(http.get("/"), 200);
    expect(http.get("/tiles/1/1/1.png"), 200);
    expect(http.get("/tiles/2/0/0.png"), 404);
    expect(http.get("/tiles/99/0/0.png"), 400);
    const auto created = expect(http.post("/cases", R"({"name":"offline"})"), 201);
    const std::string c = created.status == 201 ? json::parse(created.body)["case_id"].get<std::string>() : "case-0001";
    expect(http.get("/cases"), 200);
    expect(http.get("/cases/" + c), 200);
    auto import = [&](const std::string& fmt, const std::string& file, int status = 201) {
      return expect(http.post("/cases/" + c + "/import?format=" + fmt, slurp(fixture(file)), "application/octet-stream"),
                    status);
    };
    const auto g = import("gpx", "geodata/golden.gpx");
    import("kml", "geodata/golden.kml");
    import("gml", "geodata/golden.gml");
    import("geojson", "geodata/golden.geojson");
    import("gpx", "geodata/golden.kml", 400);
    const auto w = import("wifi", "csv/wifi_scan.csv");
    import("bt", "csv/bt.csv");
    import("anpr", "csv/anpr.csv");
    import("camera", "csv/cameras.csv");
    expect(http.get("/cases/" + c + "/layers"), 200);
    const std::string lid = g.status == 201 ? json::parse(g.body)["layer_id"].get<std::string>() : "layer-0001";
    expect(http.get("/cases/" + c + "/layers/" + lid + ".geojson"), 200);
    expect(http.get("/cameras?lat=52.08&lon=4.325&radius_m=500&exclude=private"), 200);
    expect(http.get("/cameras/CAM-1"), 200);
    expect(http.get("/scans"), 200);
    const std::string sid = w.status == 201 ? json::parse(w.body)["scan_id"].get<std::string>() : "scan-0001";
    expect(http.post("/analysis/scan-diff", json{{"scan_a", sid}, {"scan_b", sid}}.dump()), 200);
    expect(http.get("/analysis/bssid/AA:BB:CC"), 200);
    expect(http.post("/analysis/presence", R"({"bssids":["AA:BB:CC:DD:EE:FF"]})"), 200);
    expect(http.post("/analysis/correlate", R"({"dt_s":60,"d_m":100})"), 200);
    const std::string tid =
        g.status == 201 && !json::parse(g.body)["track_ids"].empty() ? json::parse(g.body)["track_ids"][0].get<std::string>() : "track-0001";
    expect(http.post("/analysis/stops", json{{"track_id", tid}, {"epsilon_m", 50}, {"tau_s", 5}}.dump()), 200);
    expect(http.get("/tracks"), 200);
    expect(http.get("/tracks/" + tid + "?from=2016-05-01T12:00:05Z&to=2016-05-01T12:00:30Z"), 200);
    expect(http.get("/no/such/route"), 404);
  }
  kill(child.pid, SIGTERM);
  int status = 0;
  waitpid(child.pid, &status, 0);
  close(child.out_fd);
  o.require(WIFEXITED(status) && WEXITSTATUS(status) == 0, "server shutdown");

  std::size_t outbound = 0;
  std::size_t dns = 0;
  std::size_t binds = 0;
  std::size_t foreign_binds = 0;
  for (const auto& l : lines_of(slurp(log))) {
    if (l.rfind("connect ", 0) == 0 || l.rfind("sendto ", 0) == 0) ++outbound;
    if (l.rfind("dns ", 0) == 0 || l.rfind("rdns ", 0) == 0) ++dns;
    if (l.rfind("bind ", 0) == 0) {
      ++binds;
      if (l.rfind("bind 127.0.0.1:", 0) != 0) ++foreign_binds;
    }
  }
  o.require(outbound == 0, std::to_string(outbound) + " outbound connections");
  o.require(dns == 0, std::to_string(dns) + " name resolutions");
  o.require(binds >= 1 && foreign_binds == 0, "bind addresses");

  // 3. Public bind refused without the override.
  const auto refused = fgis::test::run_process({FGIS_BINARY, "serve", "--bind", "0.0.0.0", "--port", "0", "--tiles",
                                                fixture("tiles").string(), "--cases", (dir / "cases").string()});
  o.require(refused.exit_code == 3 && refused.err.find("BindRefused") != std::string::npos, "public bind refusal");

  o.detail << calls << " API calls (" << unexpected << " unexpected statuses), " << outbound << " outbound, " << dns
           << " DNS, " << binds << " bind(s) all on 127.0.0.1; 0.0.0.0 without override exit " << refused.exit_code;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1 && std::string(argv[1]) == "--netwatch-probe") return netwatch_probe();
  signal(SIGPIPE, SIG_IGN);
  const std::string self = fs::canonical("/proc/self/exe").string();

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"tile-math", tile_math},
      {"radius-query", radius_query},
      {"parser-corpus", parser_corpus},
      {"scan-diff", scan_diff},
      {"correlation", correlation},
      {"stop-detection", stop_detection},
      {"offline-guarantee", [&] { return offline_guarantee(self); }},
      {"tile-serving", tile_serving},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail.str() << " [" << seconds_since(t0) << " s]" << std::endl;
    failed += !o.pass;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
