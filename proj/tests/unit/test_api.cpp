#include <doctest.h>

#include <json.hpp>

#include "fgis/api/server.hpp"
#include "fgis/api/service.hpp"
#include "fgis/api/service_config.hpp"
#include "fgis/error.hpp"
#include "fgis/ingest.hpp"
#include "test_support.hpp"

using namespace fgis;
using namespace fgis::api;
using nlohmann::json;
using fgis::test::fixture;
using fgis::test::slurp;
using fgis::test::spit;
using fgis::test::TempDir;

namespace {

struct Harness {
  TempDir dir;
  std::unique_ptr<Service> svc;

  explicit Harness(ServiceOptions opts = {}) {
    svc = std::make_unique<Service>(tiles::TileArchive::open(fixture("tiles")),
                                    store::EvidenceStore::open(dir / "store"), opts);
  }

  Response get(const std::string& path, std::map<std::string, std::string> q = {}) const {
    return svc->handle({"GET", path, std::move(q), ""});
  }
  Response post(const std::string& path, const std::string& body, std::map<std::string, std::string> q = {}) const {
    return svc->handle({"POST", path, std::move(q), body});
  }
  std::string new_case() const { return json::parse(post("/cases", R"({"name":"test"})").body)["case_id"]; }
  json import(const std::string& case_id, const std::string& format, const std::string& body, int expect = 201) const {
    const auto r = post("/cases/" + case_id + "/import", body, {{"format", format}});
    CHECK(r.status == expect);
    return json::parse(r.body);
  }
};

void check_error(const Response& r, int status, const std::string& code) {
  CHECK(r.status == status);
  const auto j = json::parse(r.body);
  CHECK(j["code"] == code);
  CHECK(j["message"].is_string());
}

// Ten fixes at one spot spanning 600 s.
std::string stationary_gpx() {
  std::string s = "<gpx><trk><trkseg>";
  for (int i = 0; i < 10; ++i) {
    const int secs = i * 600 / 9;
    char buf[160];
    std::snprintf(buf, sizeof buf, R"(<trkpt lat="52.08" lon="4.325"><time>2016-05-01T12:%02d:%02dZ</time></trkpt>)",
                  secs / 60, secs % 60);
    s += buf;
  }
  return s + "</trkseg></trk></gpx>";
}

}  // namespace

TEST_CASE("health") {
  Harness h;
  const auto r = h.get("/health");
  CHECK(r.status == 200);
  const auto j = json::parse(r.body);
  CHECK(j["status"] == "ok");
  CHECK(j["tile_count"] == 3);
  CHECK(j["case_count"] == 0);
  CHECK(j["version"].is_string());
  check_error(h.get("/no/such/route"), 404, "NotFound");
  check_error(h.get("/health/extra"), 404, "NotFound");
}

TEST_CASE("tile endpoint") {
  Harness h;
  const auto r = h.get("/tiles/1/1/1.png");
  CHECK(r.status == 200);
  CHECK(r.content_type == "image/png");
  CHECK(r.body == slurp(fixture("tiles/1/1/1.png")));
  check_error(h.get("/tiles/2/0/0.png"), 404, "NotFound");
  check_error(h.get("/tiles/99/0/0.png"), 400, "ZoomOutOfRange");
  check_error(h.get("/tiles/2/9/0.png"), 400, "InvalidTileCoord");
  check_error(h.get("/tiles/a/0/0.png"), 400, "MalformedQuery");
}

TEST_CASE("cases, import and layers") {
  Harness h;
  check_error(h.post("/cases", "{}"), 400, "InvalidParameters");
  check_error(h.post("/cases", "not json"), 400, "MalformedQuery");
  const auto c = h.new_case();
  CHECK(json::parse(h.get("/cases").body).size() == 1);
  CHECK(json::parse(h.get("/cases/" + c).body)["name"] == "test");
  check_error(h.get("/cases/nope"), 404, "UnknownCase");
  CHECK(json::parse(h.get("/cases/" + c + "/layers").body).empty());

  const auto golden = slurp(fixture("geodata/golden.gpx"));
  const auto imp = h.import(c, "gpx", golden);
  CHECK(imp["feature_count"] == 3);
  const std::string lid = imp["layer_id"];
  CHECK(imp["track_ids"].size() == 1);

  const auto bad = h.post("/cases/" + c + "/import", slurp(fixture("geodata/golden.kml")), {{"format", "gpx"}});
  check_error(bad, 400, "MalformedDocument");
  CHECK(json::parse(bad.body)["message"].get<std::string>().rfind("gpx import: ", 0) == 0);
  check_error(h.post("/cases/nope/import", golden, {{"format", "gpx"}}), 404, "UnknownCase");
  check_error(h.post("/cases/" + c + "/import", golden, {{"format", "shp"}}), 400, "MalformedQuery");
  check_error(h.post("/cases/" + c + "/import", golden), 400, "MalformedQuery");

  const auto layers = json::parse(h.get("/cases/" + c + "/layers").body);
  REQUIRE(layers.size() == 1);
  CHECK(layers[0]["layer_id"] == lid);
  CHECK(layers[0]["feature_count"] == 3);
  CHECK(layers[0]["provenance"]["content_sha256"] == ingest::sha256_hex(golden));

  const auto doc = h.get("/cases/" + c + "/layers/" + lid + ".geojson");
  CHECK(doc.status == 200);
  const auto original = ingest::parse_gpx(golden);
  const auto back = ingest::parse_geojson(doc.body);
  REQUIRE(back.features.size() == original.features.size());
  for (std::size_t i = 0; i < back.features.size(); ++i) {
    CHECK(back.features[i].geometry.index() == original.features[i].geometry.index());
  }
  check_error(h.get("/cases/" + c + "/layers/nope.geojson"), 404, "UnknownLayer");

  // Other formats.
  CHECK(h.import(c, "kml", slurp(fixture("geodata/golden.kml")))["skipped_count"] == 1);
  CHECK(h.import(c, "gml", slurp(fixture("geodata/golden.gml")))["feature_count"] == 2);
  CHECK(h.import(c, "geojson", slurp(fixture("geodata/golden.geojson")))["feature_count"] == 2);
  CHECK(h.import(c, "wifi", slurp(fixture("csv/wifi_scan.csv")))["observation_count"] == 3);
  CHECK(h.import(c, "bt", slurp(fixture("csv/bt.csv")))["count"] == 2);
  CHECK(h.import(c, "anpr", slurp(fixture("csv/anpr.csv")))["count"] == 2);
  CHECK(h.import(c, "camera", slurp(fixture("csv/cameras.csv")))["count"] == 3);

  const auto strict = h.post("/cases/" + c + "/import", slurp(fixture("csv/wifi_bad_rows.csv")), {{"format", "wifi"}});
  check_error(strict, 400, "BadRow");
  CHECK(json::parse(strict.body)["message"].get<std::string>().find("row 3") != std::string::npos);
  const auto lenient = h.post("/cases/" + c + "/import", slurp(fixture("csv/wifi_bad_rows.csv")),
                              {{"format", "wifi"}, {"lenient", "true"}});
  CHECK(lenient.status == 201);
  CHECK(json::parse(lenient.body)["skipped_rows"].size() == 3);

  CHECK(json::parse(h.get("/health").body)["case_count"] == 1);
}

TEST_CASE("camera endpoints") {
  Harness h;
  const auto c = h.new_case();
  h.import(c, "camera", slurp(fixture("csv/cameras.csv")));
  const auto all = json::parse(h.get("/cameras").body);
  CHECK(all.size() == 3);

  const auto at = json::parse(h.get("/cameras", {{"lat", "52.0800"}, {"lon", "4.3250"}, {"radius_m", "0"}}).body);
  REQUIRE(at.size() == 1);
  CHECK(at[0]["camera"]["camera_id"] == "CAM-1");
  CHECK(at[0]["distance_m"] == 0.0);

  const auto wide = json::parse(h.get("/cameras", {{"lat", "52.08"}, {"lon", "4.325"}, {"radius_m", "1000"}}).body);
  REQUIRE(wide.size() == 3);
  CHECK(wide[0]["camera"]["camera_id"] == "CAM-1");
  CHECK(wide[1]["camera"]["camera_id"] == "CAM-2");
  CHECK(wide[2]["camera"]["camera_id"] == "CAM-3");

  const auto no_private = json::parse(
      h.get("/cameras", {{"lat", "52.08"}, {"lon", "4.325"}, {"radius_m", "1000"}, {"exclude", "private"}}).body);
  CHECK(no_private.size() == 2);
  for (const auto& hit : no_private) CHECK(hit["camera"]["category"] != "private");
  const auto only_public = json::parse(
      h.get("/cameras", {{"lat", "52.08"}, {"lon", "4.325"}, {"radius_m", "1000"}, {"exclude", "private,unknown"}}).body);
  CHECK(only_public.size() == 1);

  check_error(h.get("/cameras", {{"lat", "95"}, {"lon", "4"}, {"radius_m", "10"}}), 400, "InvalidCoordinate");
  check_error(h.get("/cameras", {{"lat", "abc"}, {"lon", "4"}, {"radius_m", "10"}}), 400, "MalformedQuery");
  check_error(h.get("/cameras", {{"lat", "52"}, {"lon", "4"}}), 400, "MalformedQuery");
  check_error(h.get("/cameras", {{"lat", "52"}, {"lon", "4"}, {"radius_m", "-1"}}), 400, "InvalidParameters");
  check_error(h.get("/cameras", {{"lat", "52"}, {"lon", "4"}, {"radius_m", "1"}, {"exclude", "blue"}}), 400, "MalformedQuery");

  const auto one = json::parse(h.get("/cameras/CAM-1").body);
  CHECK(one["owner_contact"] == "Jansen Bakery, +31 70 555 0101");
  CHECK(one["description"] == "Entrance");
  check_error(h.get("/cameras/CAM-9"), 404, "UnknownCamera");
}

TEST_CASE("analysis endpoints") {
  Harness h;
  const auto c = h.new_case();
  CHECK(json::parse(h.post("/analysis/correlate", "{}").body).empty());

  const std::string sid = h.import(c, "wifi", slurp(fixture("csv/wifi_scan.csv")))["scan_id"];
  const auto self = json::parse(h.post("/analysis/scan-diff", json{{"scan_a", sid}, {"scan_b", sid}}.dump()).body);
  CHECK(self["added"].empty());
  CHECK(self["removed"].empty());
  CHECK(self["renamed"].empty());
  CHECK(self["unchanged"].size() == 3);
  check_error(h.post("/analysis/scan-diff", json{{"scan_a", sid}, {"scan_b", "nope"}}.dump()), 404, "UnknownScan");
  check_error(h.post("/analysis/scan-diff", "{}"), 400, "MalformedQuery");

  const auto hits = json::parse(h.get("/analysis/bssid/aa-bb-cc-dd-ee-ff").body);
  REQUIRE(hits.size() == 1);
  CHECK(hits[0]["scan_id"] == sid);
  CHECK(hits[0]["observation"]["bssid"] == "AA:BB:CC:DD:EE:FF");
  CHECK(json::parse(h.get("/analysis/bssid/00:11:22").body).size() == 2);
  check_error(h.get("/analysis/bssid/zz"), 400, "MalformedQuery");

  const auto presence = json::parse(h.post("/analysis/presence", R"({"bssids":["00:11:22:33:44:55"]})").body);
  REQUIRE(presence.size() == 1);
  CHECK(presence[0]["timestamp"] == "2016-05-01T12:00:05Z");
  CHECK(presence[0]["ssid"].is_null());
  check_error(h.post("/analysis/presence", R"({"bssids":["nope"]})"), 400, "MalformedQuery");

  h.import(c, "bt", slurp(fixture("csv/bt.csv")));
  h.import(c, "anpr", slurp(fixture("csv/anpr.csv")));
  const auto corr = json::parse(h.post("/analysis/correlate", R"({"dt_s": 60, "d_m": 100})").body);
  REQUIRE_FALSE(corr.empty());
  CHECK(corr[0]["mac"] == "AA:BB:CC:DD:EE:FF");
  CHECK(corr[0]["plate"] == "AB123C");
  CHECK(json::parse(h.post("/analysis/correlate", "{\"\xCE\x94t_s\": 0, \"d_m\": 100}").body).empty());
  check_error(h.post("/analysis/correlate", R"({"dt_s": -5})"), 400, "InvalidParameters");
  check_error(h.post("/analysis/correlate", R"({"dt_s": "x"})"), 400, "InvalidParameters");

  const auto gpx = h.import(c, "gpx", stationary_gpx());
  const std::string tid = gpx["track_ids"][0];
  const auto stops = json::parse(h.post("/analysis/stops", json{{"track_id", tid}, {"epsilon_m", 50}, {"tau_s", 300}}.dump()).body);
  REQUIRE(stops.size() == 1);
  CHECK(stops[0]["dwell_s"] == 600.0);
  check_error(h.post("/analysis/stops", json{{"track_id", tid}, {"epsilon_m", 0}}.dump()), 400, "InvalidParameters");
  check_error(h.post("/analysis/stops", json{{"track_id", "nope"}}.dump()), 404, "UnknownTrack");

  const auto full = json::parse(h.get("/tracks/" + tid).body);
  CHECK(full["points"].size() == 10);
  const auto part = json::parse(h.get("/tracks/" + tid, {{"from", "2016-05-01T12:02:00Z"}, {"to", "2016-05-01T12:05:00Z"}}).body);
  CHECK(part["points"].size() == 3);
  const auto before = json::parse(h.get("/tracks/" + tid, {{"to", "2016-05-01T11:00:00Z"}}).body);
  CHECK(before["points"].empty());
  check_error(h.get("/tracks/" + tid, {{"from", "2016-05-01T12:05:00Z"}, {"to", "2016-05-01T12:00:00Z"}}), 400, "InvalidParameters");
  check_error(h.get("/tracks/" + tid, {{"from", "yesterday"}}), 400, "MalformedQuery");
  CHECK(json::parse(h.get("/tracks").body).size() == 1);
  CHECK(json::parse(h.get("/scans").body).size() == 1);
  CHECK(json::parse(h.get("/scans/" + sid).body)["observations"].size() == 3);
}

TEST_CASE("GET responses are byte-stable") {
  Harness h;
  const auto c = h.new_case();
  h.import(c, "gpx", slurp(fixture("geodata/golden.gpx")));
  h.import(c, "camera", slurp(fixture("csv/cameras.csv")));
  for (const auto& path : std::vector<std::string>{"/health", "/cases", "/cameras", "/cases/" + c + "/layers", "/cases/" + c + "/layers/layer-0001.geojson",
                           std::string("/tracks")}) {
    CHECK(h.get(path).body == h.get(path).body);
  }
}

TEST_CASE("static assets") {
  SUBCASE("fallback index") {
    Harness h;
    const auto r = h.get("/");
    CHECK(r.status == 200);
    CHECK(r.content_type.rfind("text/html", 0) == 0);
  }
  SUBCASE("ui root") {
    TempDir ui;
    spit(ui / "index.html", "<html>ui</html>");
    spit(ui / "app.js", "console.log(1)");
    Harness h(ServiceOptions{false, ui.path()});
    CHECK(h.get("/").body == "<html>ui</html>");
    CHECK(h.get("/app.js").content_type.rfind("text/javascript", 0) == 0);
    check_error(h.get("/../etc/passwd"), 404, "NotFound");
    check_error(h.get("/missing.js"), 404, "NotFound");
  }
}

TEST_CASE("storage errors do not leak paths") {
  Harness h;
  const auto c = h.new_case();
  std::filesystem::permissions(h.dir / "store" / "cases" / c, std::filesystem::perms::owner_read | std::filesystem::perms::owner_exec);
  const auto r = h.post("/cases/" + c + "/import", slurp(fixture("geodata/golden.gpx")), {{"format", "gpx"}});
  std::filesystem::permissions(h.dir / "store" / "cases" / c, std::filesystem::perms::owner_all);
  if (geteuid() == 0) return;  // root ignores the permission bits
  CHECK(r.status == 500);
  CHECK(r.body.find(h.dir.path().string()) == std::string::npos);
}

TEST_CASE("service config") {
  TempDir dir;
  const auto cfg = parse_config(R"({"tile_archive_path": "tiles", "case_root_path": "/srv/cases", "port": 0})", dir.path());
  CHECK(cfg.tile_archive_path == dir.path() / "tiles");
  CHECK(cfg.case_root_path == "/srv/cases");
  CHECK(cfg.bind_address == "127.0.0.1");
  CHECK(cfg.port == 0);
  CHECK(cfg.cache_capacity == 1024);
  CHECK_FALSE(cfg.lenient_import);

  auto field_error = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidConfig);
      return std::string(e.what());
    }
    return std::string("no error");
  };
  CHECK(field_error(R"({"case_root_path": "c"})").find("tile_archive_path") != std::string::npos);
  CHECK(field_error(R"({"tile_archive_path": "t", "case_root_path": "c", "prot": 1})").find("prot") != std::string::npos);
  CHECK(field_error(R"({"tile_archive_path": "t", "case_root_path": "c", "port": 70000})").find("port") != std::string::npos);
  CHECK(field_error("nope").find("JSON") != std::string::npos);

  ServiceConfig missing = cfg;
  missing.tile_archive_path = dir / "absent";
  missing.case_root_path = dir.path();
  try {
    validate_config(missing);
    FAIL("expected InvalidConfig");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidConfig);
    CHECK(std::string(e.what()).find("tile_archive_path") != std::string::npos);
  }

  spit(dir / "fgis.json", R"({"tile_archive_path": ")" + fixture("tiles").string() + R"(", "case_root_path": "."})");
  const auto loaded = load_config(dir / "fgis.json");
  CHECK(loaded.case_root_path == dir.path() / ".");
  CHECK_NOTHROW(validate_config(loaded));
}

TEST_CASE("bind policy") {
  for (const auto* a : {"127.0.0.1", "127.8.9.10", "10.1.2.3", "172.16.0.1", "172.31.255.255", "192.168.1.10", "::1", "fd12::1"}) {
    CAPTURE(a);
    CHECK(is_private_address(a) == std::optional<bool>(true));
    CHECK_NOTHROW(check_bind_address(a, false));
  }
  for (const auto* a : {"0.0.0.0", "8.8.8.8", "172.32.0.1", "192.169.0.1", "::", "2001:db8::1"}) {
    CAPTURE(a);
    CHECK(is_private_address(a) == std::optional<bool>(false));
    try {
      check_bind_address(a, false);
      FAIL("expected BindRefused");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::BindRefused);
      CHECK(std::string(e.what()).find("--allow-public-bind") != std::string::npos);
    }
    CHECK_NOTHROW(check_bind_address(a, true));
  }
  CHECK_FALSE(is_private_address("localhost"));
  CHECK_THROWS_AS(check_bind_address("localhost", true), Error);
}

TEST_CASE("server refuses public binds before touching the network") {
  Harness h;
  Server server(*h.svc);
  try {
    server.bind("8.8.8.8", 0, false);
    FAIL("expected BindRefused");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BindRefused);
  }
  CHECK(server.bind("127.0.0.1", 0, false) > 0);
}
