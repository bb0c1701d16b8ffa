#include "fgis/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cctype>
#include <json.hpp>
#include <numbers>
#include <random>
#include <set>

#include "fgis/error.hpp"
#include "fgis/mac_address.hpp"
#include "store/atomic_file.hpp"

namespace fgis::synth {
namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;
using std::chrono::milliseconds;

// mt19937_64 is specified bit-exactly by the standard; the distributions are
// not, so every draw goes through these helpers.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream) : eng_(seed * 0x9E3779B97F4A7C15ULL ^ stream) {}

  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(eng_() % static_cast<std::uint64_t>(hi - lo + 1));
  }
  bool chance(double p) { return uniform() < p; }
  std::uint64_t bits() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

enum Stream : std::uint64_t { kSensors = 1, kVehicles, kCameras, kScans, kTrack, kPlanted };

constexpr double kDegToRad = std::numbers::pi / 180.0;

GeoPoint offset(const GeoPoint& p, double north_m, double east_m) {
  const double dlat = north_m / kEarthRadiusMeters / kDegToRad;
  const double dlon = east_m / (kEarthRadiusMeters * std::cos(p.lat() * kDegToRad)) / kDegToRad;
  return GeoPoint(std::clamp(p.lat() + dlat, -90.0, 90.0), p.lon() + dlon);
}

GeoPoint random_in_disc(Rng& rng, const GeoPoint& c, double radius_m) {
  const double r = radius_m * std::sqrt(rng.uniform());
  const double a = rng.uniform(0.0, 2.0 * std::numbers::pi);
  return offset(c, r * std::cos(a), r * std::sin(a));
}

std::string fixed(double v, int decimals = 7) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

Timestamp at(Timestamp base, double seconds) {
  return base + milliseconds(static_cast<std::int64_t>(std::llround(seconds * 1000.0)));
}

MacAddress random_mac(Rng& rng, std::set<MacAddress>& taken) {
  for (;;) {
    const std::uint64_t b = rng.bits();
    MacAddress::Octets o{};
    for (int i = 0; i < 6; ++i) o[i] = static_cast<std::uint8_t>(b >> (8 * i));
    o[0] &= 0xFE;  // unicast
    const MacAddress mac(o);
    if (taken.insert(mac).second) return mac;
  }
}

std::string random_plate(Rng& rng, std::set<std::string>& taken) {
  for (;;) {
    std::string p;
    p += static_cast<char>('A' + rng.integer(0, 25));
    p += static_cast<char>('A' + rng.integer(0, 25));
    for (int i = 0; i < 3; ++i) p += static_cast<char>('0' + rng.integer(0, 9));
    p += static_cast<char>('A' + rng.integer(0, 25));
    if (taken.insert(p).second) return p;
  }
}

// k distinct indices from [0, n), in visiting order.
std::vector<int> pick_distinct(Rng& rng, int n, int k) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
  for (int i = 0; i < k; ++i) {
    const auto j = rng.integer(i, n - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

// ------------------------------------------------------------- bt / anpr

struct Sensor {
  std::string id;
  GeoPoint bt;
  GeoPoint anpr;
};

struct Row {
  Timestamp t;
  std::string key;
  std::string line;
};

std::string rows_to_csv(const std::string& header, std::vector<Row> rows) {
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    if (a.t != b.t) return a.t < b.t;
    return a.key < b.key;
  });
  std::string out = header + "\n";
  for (const auto& r : rows) out += r.line + "\n";
  return out;
}

void generate_vehicles(const SyntheticSpec& spec, Dataset& out, ojson& truth) {
  Rng srng(spec.seed, kSensors);
  std::vector<Sensor> sensors;
  for (int i = 0; i < spec.n_sensors; ++i) {
    GeoPoint p = spec.center;
    for (int attempt = 0; attempt < 200; ++attempt) {
      p = random_in_disc(srng, spec.center, 5000.0);
      const bool spaced = std::all_of(sensors.begin(), sensors.end(), [&](const Sensor& s) {
        return haversine_distance(s.bt, p) >= 500.0;
      });
      if (spaced) break;
    }
    char id[16];
    std::snprintf(id, sizeof id, "S%02d", i + 1);
    sensors.push_back({id, p, offset(p, 0.0, 10.0)});
  }

  std::vector<Row> bt_rows;
  std::vector<Row> anpr_rows;
  std::set<MacAddress> macs;
  std::set<std::string> plates;

  auto pass = [&](Rng& rng, const MacAddress& mac, const std::string& plate, bool bt_visible,
                  const Sensor& s, Timestamp t) {
    if (bt_visible) {
      const Timestamp tb = t + std::chrono::seconds(rng.integer(-15, 15));
      bt_rows.push_back({tb, mac.to_string() + s.id,
                         format_iso8601(tb) + "," + mac.to_string() + "," + s.id + "," +
                             fixed(s.bt.lat()) + "," + fixed(s.bt.lon())});
    }
    if (rng.chance(spec.anpr_p)) {
      const Timestamp ta = t + std::chrono::seconds(rng.integer(-3, 3));
      anpr_rows.push_back({ta, plate + s.id,
                           format_iso8601(ta) + "," + plate + "," + s.id + "," + fixed(s.anpr.lat()) + "," +
                               fixed(s.anpr.lon())});
    }
  };

  auto trip = [&](Rng& rng, const MacAddress& mac, const std::string& plate, bool bt_visible, int n_pass) {
    const auto route = pick_distinct(rng, spec.n_sensors, n_pass);
    double t = rng.uniform(0.0, spec.time_window_s);
    std::vector<std::string> ids;
    for (int k : route) {
      const Sensor& s = sensors[static_cast<std::size_t>(k)];
      pass(rng, mac, plate, bt_visible, s, at(spec.start_time, std::floor(t)));
      ids.push_back(s.id);
      t += rng.uniform(120.0, 600.0);
    }
    return ids;
  };

  // Planted identifiers are reserved first so noise never reuses them.
  std::optional<MacAddress> planted_mac;
  std::string planted_plate;
  Rng prng(spec.seed, kPlanted);
  if (spec.planted_pair) {
    if (!spec.planted_pair->mac.empty()) {
      planted_mac = MacAddress::parse(spec.planted_pair->mac);
      macs.insert(*planted_mac);
    } else {
      planted_mac = random_mac(prng, macs);
    }
    planted_plate = spec.planted_pair->plate.empty() ? random_plate(prng, plates) : spec.planted_pair->plate;
    plates.insert(planted_plate);
  }

  Rng vrng(spec.seed, kVehicles);
  const int max_noise_pass = std::min(4, spec.n_sensors);
  for (int v = 0; v < spec.n_noise_vehicles && max_noise_pass > 0; ++v) {
    const MacAddress mac = random_mac(vrng, macs);
    const std::string plate = random_plate(vrng, plates);
    const bool visible = vrng.chance(spec.bt_p);
    trip(vrng, mac, plate, visible, static_cast<int>(vrng.integer(1, max_noise_pass)));
  }

  if (spec.planted_pair) {
    const auto ids = trip(prng, *planted_mac, planted_plate, true, spec.planted_pair->n_sensors);
    truth["planted_pair"] = {{"mac", planted_mac->to_string()}, {"plate", planted_plate}, {"sensor_ids", ids}};
  } else {
    truth["planted_pair"] = nullptr;
  }

  ojson sensor_list = ojson::array();
  for (const auto& s : sensors) {
    sensor_list.push_back({{"sensor_id", s.id},
                           {"bt", {{"lat", s.bt.lat()}, {"lon", s.bt.lon()}}},
                           {"anpr", {{"lat", s.anpr.lat()}, {"lon", s.anpr.lon()}}}});
  }
  truth["sensors"] = sensor_list;
  truth["counts"]["bt"] = bt_rows.size();
  truth["counts"]["anpr"] = anpr_rows.size();
  out["bt.csv"] = rows_to_csv("timestamp,mac,sensor_id,lat,lon", std::move(bt_rows));
  out["anpr.csv"] = rows_to_csv("timestamp,plate,sensor_id,lat,lon", std::move(anpr_rows));
}

// --------------------------------------------------------------- cameras

void generate_cameras(const SyntheticSpec& spec, Dataset& out, ojson& truth) {
  static constexpr const char* kKinds[] = {"shop entrance", "parking lot", "petrol station", "bank lobby",
                                           "street corner", "residential porch", "bus stop", "warehouse"};
  Rng rng(spec.seed, kCameras);
  std::string csv = "camera_id,lat,lon,category,owner,description\n";
  for (int i = 0; i < spec.n_cameras; ++i) {
    const GeoPoint p = random_in_disc(rng, spec.center, 3000.0);
    const double u = rng.uniform();
    const char* category = u < 0.40 ? "public" : (u < 0.85 ? "private" : "unknown");
    const char* kind = kKinds[rng.integer(0, 7)];
    char id[16];
    std::snprintf(id, sizeof id, "CAM-%05d", i + 1);
    char owner[64];
    std::snprintf(owner, sizeof owner, "Registrant %04d, +31 70 555 %04d", static_cast<int>(rng.integer(1, 9999)),
                  static_cast<int>(rng.integer(0, 9999)));
    csv += std::string(id) + "," + fixed(p.lat()) + "," + fixed(p.lon()) + "," + category + "," +
           csv_field(owner) + "," + csv_field(std::string("Camera at ") + kind) + "\n";
  }
  truth["counts"]["cameras"] = spec.n_cameras;
  out["cameras.csv"] = std::move(csv);
}

// ----------------------------------------------------------------- Wi-Fi

void generate_scans(const SyntheticSpec& spec, Dataset& out, ojson& truth) {
  static constexpr const char* kWords[] = {"Ziggo", "KPN", "Linksys", "HomeNet", "Fritz!Box", "Cafe Plein",
                                           "Bakkerij", "Guest", "TP-LINK", "Huis", "Office", "Studio"};
  enum class Fate { Unchanged, Removed, Added, Renamed };
  Rng rng(spec.seed, kScans);
  std::set<MacAddress> taken;

  struct Network {
    MacAddress bssid;
    std::string ssid_a;  // "" = hidden
    std::string ssid_b;
    GeoPoint position;
    Fate fate;
  };
  auto ssid_name = [&] {
    if (rng.chance(0.05)) return std::string();
    return std::string(kWords[rng.integer(0, 11)]) + "-" + std::to_string(rng.integer(100, 999));
  };

  std::vector<Network> nets;
  for (int i = 0; i < spec.n_scan_networks; ++i) {
    Network n{random_mac(rng, taken), ssid_name(), "", random_in_disc(rng, spec.center, 300.0), Fate::Unchanged};
    const double u = rng.uniform();
    n.fate = u < 0.70 ? Fate::Unchanged : (u < 0.80 ? Fate::Removed : (u < 0.90 ? Fate::Added : Fate::Renamed));
    n.ssid_b = n.ssid_a;
    if (n.fate == Fate::Renamed) {
      do n.ssid_b = ssid_name();
      while (n.ssid_b == n.ssid_a);
    }
    nets.push_back(std::move(n));
  }

  auto scan_csv = [&](Timestamp start, bool second) {
    std::vector<Row> rows;
    for (const auto& n : nets) {
      if (second ? n.fate == Fate::Removed : n.fate == Fate::Added) continue;
      const std::string& ssid = second ? n.ssid_b : n.ssid_a;
      const auto k = rng.integer(1, 3);
      for (std::int64_t i = 0; i < k; ++i) {
        const Timestamp t = at(start, std::floor(rng.uniform(0.0, 1800.0)));
        const GeoPoint p = random_in_disc(rng, n.position, 30.0);
        rows.push_back({t, n.bssid.to_string(),
                        format_iso8601(t) + "," + n.bssid.to_string() + "," + csv_field(ssid) + "," +
                            fixed(p.lat()) + "," + fixed(p.lon()) + "," + std::to_string(rng.integer(-90, -30))});
      }
    }
    return rows_to_csv("timestamp,bssid,ssid,lat,lon,signal_dbm", std::move(rows));
  };
  out["scan_a.csv"] = scan_csv(spec.start_time, false);
  out["scan_b.csv"] = scan_csv(spec.start_time + std::chrono::days(7), true);

  ojson diff = {{"added", ojson::array()}, {"removed", ojson::array()}, {"renamed", ojson::array()},
                {"unchanged", ojson::array()}};
  auto opt = [](const std::string& s) { return s.empty() ? ojson(nullptr) : ojson(s); };
  std::vector<const Network*> sorted;
  for (const auto& n : nets) sorted.push_back(&n);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->bssid < b->bssid; });
  for (const Network* n : sorted) {
    const std::string b = n->bssid.to_string();
    switch (n->fate) {
      case Fate::Unchanged: diff["unchanged"].push_back(b); break;
      case Fate::Removed: diff["removed"].push_back(b); break;
      case Fate::Added: diff["added"].push_back(b); break;
      case Fate::Renamed:
        diff["renamed"].push_back({{"bssid", b}, {"old_ssid", opt(n->ssid_a)}, {"new_ssid", opt(n->ssid_b)}});
        break;
    }
  }
  truth["scan_diff"] = diff;
}

// ----------------------------------------------------------------- track

void generate_track(const SyntheticSpec& spec, Dataset& out, ojson& truth) {
  const auto& tp = *spec.track_profile;
  Rng rng(spec.seed, kTrack);
  struct Sample {
    GeoPoint p;
    Timestamp t;
  };
  std::vector<Sample> samples;
  std::size_t tick = 0;
  auto emit = [&](const GeoPoint& p) {
    samples.push_back({p, at(tp.start_time, static_cast<double>(tick) * tp.sample_interval_s)});
    ++tick;
  };
  const double step = tp.speed_mps * tp.sample_interval_s;

  // Legs take floor(d / step) samples so consecutive moving samples are at
  // least one full step apart.
  auto move_to = [&](const GeoPoint& from, const GeoPoint& to, bool jitter_arrival) {
    const double d = haversine_distance(from, to);
    const auto n = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(d / step)));
    double dlon = to.lon() - from.lon();
    if (dlon > 180.0) dlon -= 360.0;
    if (dlon < -180.0) dlon += 360.0;
    for (std::int64_t k = 1; k <= n; ++k) {
      const double f = static_cast<double>(k) / static_cast<double>(n);
      GeoPoint p(from.lat() + f * (to.lat() - from.lat()), from.lon() + f * dlon);
      if (k == n && jitter_arrival) p = random_in_disc(rng, to, tp.stop_jitter_m);
      emit(p);
    }
  };

  ojson stops = ojson::array();
  emit(tp.start);
  GeoPoint here = tp.start;
  for (const auto& s : tp.stops) {
    const auto m = static_cast<std::int64_t>(std::llround(s.dwell_s / tp.sample_interval_s));
    move_to(here, s.position, m > 0);
    const Timestamp arrival = samples.back().t;
    for (std::int64_t i = 0; i < m; ++i) emit(random_in_disc(rng, s.position, tp.stop_jitter_m));
    if (m > 0) {
      stops.push_back({{"lat", s.position.lat()},
                       {"lon", s.position.lon()},
                       {"start", format_iso8601(arrival)},
                       {"end", format_iso8601(samples.back().t)},
                       {"dwell_s", seconds_between(arrival, samples.back().t)}});
    }
    here = s.position;
  }
  if (tp.end) move_to(here, *tp.end, false);

  std::string gpx =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<gpx version=\"1.1\" creator=\"fgis gen-synthetic\" xmlns=\"http://www.topografix.com/GPX/1/1\">\n"
      "  <trk>\n    <name>" +
      xml_escape("synthetic track seed " + std::to_string(spec.seed)) + "</name>\n    <trkseg>\n";
  for (const auto& s : samples) {
    gpx += "      <trkpt lat=\"" + fixed(s.p.lat()) + "\" lon=\"" + fixed(s.p.lon()) + "\"><time>" +
           format_iso8601(s.t) + "</time></trkpt>\n";
  }
  gpx += "    </trkseg>\n  </trk>\n</gpx>\n";
  out["track.gpx"] = std::move(gpx);

  truth["sample_interval_s"] = tp.sample_interval_s;
  truth["stops"] = stops;
  truth["counts"]["track_points"] = samples.size();
}

// ----------------------------------------------------------- spec parsing

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::InvalidParameters, "synthetic spec '" + field + "': " + why);
}

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) invalid(where, "must be an object");
  for (const auto& [k, v] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; })) {
      invalid(where.empty() ? k : where + "." + k, "unknown member");
    }
  }
}

double number(const json& obj, const char* key, double fallback, double lo, double hi, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj[key];
  const std::string name = where.empty() ? key : where + "." + key;
  if (!v.is_number()) invalid(name, "must be a number");
  const double d = v.get<double>();
  if (!(d >= lo && d <= hi)) invalid(name, "must be within [" + fixed(lo, 3) + ", " + fixed(hi, 3) + "]");
  return d;
}

int count(const json& obj, const char* key, int fallback, int hi) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj[key];
  if (!v.is_number_integer() || v.get<long long>() < 0 || v.get<long long>() > hi) {
    invalid(key, "must be an integer within [0, " + std::to_string(hi) + "]");
  }
  return v.get<int>();
}

GeoPoint point(const json& v, const std::string& where) {
  if (!v.is_object() || !v.contains("lat") || !v.contains("lon") || !v["lat"].is_number() ||
      !v["lon"].is_number()) {
    invalid(where, "must be {\"lat\": number, \"lon\": number}");
  }
  const double lat = v["lat"].get<double>();
  const double lon = v["lon"].get<double>();
  if (!is_valid_coordinate(lat, lon)) invalid(where, "coordinate out of range");
  return GeoPoint(lat, lon);
}

Timestamp time_member(const json& obj, const char* key, Timestamp fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj[key];
  const auto t = v.is_string() ? parse_iso8601_utc(v.get<std::string>()) : std::nullopt;
  if (!t) invalid(where + key, "must be an ISO-8601 time with zone");
  return *t;
}

}  // namespace

SyntheticSpec default_spec(std::uint64_t seed) {
  SyntheticSpec s;
  s.seed = seed;
  s.start_time = *parse_iso8601_utc("2016-05-01T08:00:00Z");
  TrackProfile tp;
  tp.start_time = s.start_time;
  tp.start = s.center;
  tp.stops.push_back({offset(s.center, 0.0, 2000.0), 400.0});
  tp.end = offset(s.center, 0.0, 4000.0);
  s.track_profile = tp;
  s.planted_pair = PlantedPair{};
  return s;
}

SyntheticSpec parse_spec(std::string_view text) {
  const json doc = json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorCode::InvalidParameters, "synthetic spec is not valid JSON");
  check_keys(doc, "",
             {"seed", "center", "start_time", "n_cameras", "n_scan_networks", "track_profile", "planted_pair",
              "bt_p", "anpr_p", "n_noise_vehicles", "n_sensors", "time_window_s"});
  std::uint64_t seed = 1;
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) invalid("seed", "must be a non-negative integer");
    seed = doc["seed"].get<std::uint64_t>();
  }
  SyntheticSpec s = default_spec(seed);
  if (doc.contains("center")) s.center = point(doc["center"], "center");
  s.start_time = time_member(doc, "start_time", s.start_time, "");
  s.n_cameras = count(doc, "n_cameras", s.n_cameras, 1'000'000);
  s.n_scan_networks = count(doc, "n_scan_networks", s.n_scan_networks, 100'000);
  s.n_noise_vehicles = count(doc, "n_noise_vehicles", s.n_noise_vehicles, 1'000'000);
  s.n_sensors = count(doc, "n_sensors", s.n_sensors, 999);
  s.bt_p = number(doc, "bt_p", s.bt_p, 0.0, 1.0, "");
  s.anpr_p = number(doc, "anpr_p", s.anpr_p, 0.0, 1.0, "");
  s.time_window_s = number(doc, "time_window_s", s.time_window_s, 1.0, 365.0 * 86400.0, "");

  if (doc.contains("planted_pair")) {
    const auto& pp = doc["planted_pair"];
    if (pp.is_null()) {
      s.planted_pair.reset();
    } else {
      check_keys(pp, "planted_pair", {"mac", "plate", "n_sensors"});
      PlantedPair p;
      if (pp.contains("mac")) {
        if (!pp["mac"].is_string() || !MacAddress::parse(pp["mac"].get<std::string>())) {
          invalid("planted_pair.mac", "must be a MAC address");
        }
        p.mac = MacAddress::parse(pp["mac"].get<std::string>())->to_string();
      }
      if (pp.contains("plate")) {
        if (!pp["plate"].is_string()) invalid("planted_pair.plate", "must be a string");
        p.plate = pp["plate"].get<std::string>();
        p.plate.erase(std::remove_if(p.plate.begin(), p.plate.end(), [](unsigned char c) { return std::isspace(c); }),
                      p.plate.end());
        for (auto& c : p.plate) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      }
      p.n_sensors = static_cast<int>(number(pp, "n_sensors", p.n_sensors, 1.0, 999.0, "planted_pair"));
      s.planted_pair = p;
    }
  }

  if (doc.contains("track_profile")) {
    const auto& t = doc["track_profile"];
    if (t.is_null()) {
      s.track_profile.reset();
    } else {
      check_keys(t, "track_profile",
                 {"start_time", "start", "stops", "end", "speed_mps", "sample_interval_s", "stop_jitter_m"});
      TrackProfile tp;
      tp.start_time = time_member(t, "start_time", s.start_time, "track_profile.");
      tp.start = t.contains("start") ? point(t["start"], "track_profile.start") : s.center;
      if (t.contains("end") && !t["end"].is_null()) tp.end = point(t["end"], "track_profile.end");
      tp.speed_mps = number(t, "speed_mps", tp.speed_mps, 0.1, 1000.0, "track_profile");
      tp.sample_interval_s = number(t, "sample_interval_s", tp.sample_interval_s, 0.001, 86400.0, "track_profile");
      tp.stop_jitter_m = number(t, "stop_jitter_m", tp.stop_jitter_m, 0.0, 10000.0, "track_profile");
      if (t.contains("stops")) {
        if (!t["stops"].is_array()) invalid("track_profile.stops", "must be an array");
        for (std::size_t i = 0; i < t["stops"].size(); ++i) {
          const auto& st = t["stops"][i];
          const std::string where = "track_profile.stops[" + std::to_string(i) + "]";
          check_keys(st, where, {"lat", "lon", "dwell_s"});
          tp.stops.push_back({point(st, where), number(st, "dwell_s", 0.0, 0.0, 30.0 * 86400.0, where)});
        }
      }
      s.track_profile = tp;
    }
  }
  if (s.planted_pair && s.planted_pair->n_sensors > s.n_sensors) {
    invalid("planted_pair.n_sensors", "exceeds n_sensors");
  }
  return s;
}

Dataset generate(const SyntheticSpec& spec) {
  if (spec.planted_pair && spec.planted_pair->n_sensors > spec.n_sensors) {
    throw Error(ErrorCode::InvalidParameters, "planted pair passes more sensors than exist");
  }
  if (spec.planted_pair && !spec.planted_pair->mac.empty() && !MacAddress::parse(spec.planted_pair->mac)) {
    throw Error(ErrorCode::InvalidParameters, "planted pair MAC is not a MAC address");
  }
  if (spec.track_profile && !(spec.track_profile->speed_mps > 0 && spec.track_profile->sample_interval_s > 0)) {
    throw Error(ErrorCode::InvalidParameters, "track speed and sample interval must be positive");
  }
  Dataset out;
  ojson truth;
  truth["seed"] = spec.seed;
  generate_vehicles(spec, out, truth);
  generate_cameras(spec, out, truth);
  generate_scans(spec, out, truth);
  if (spec.track_profile) {
    generate_track(spec, out, truth);
  } else {
    truth["stops"] = ojson::array();
  }
  out["truth.json"] = truth.dump(2) + "\n";
  return out;
}

void write_dataset(const Dataset& data, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create output directory " + out_dir.string());
  for (const auto& [name, bytes] : data) store::detail::write_atomic(out_dir / name, bytes);
}

}  // namespace fgis::synth
