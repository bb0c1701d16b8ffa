#include <CLI11.hpp>
#include <csignal>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <pthread.h>
#include <sstream>
#include <thread>

#include "fgis/api/server.hpp"
#include "fgis/api/service.hpp"
#include "fgis/error.hpp"
#include "fgis/evidence_store.hpp"
#include "fgis/synthetic.hpp"
#include "fgis/tile_archive.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using fgis::Error;
using fgis::ErrorCode;

namespace {

// Exit codes. CLI11 reports usage errors with its own codes (>= 100).
constexpr int kOk = 0;
constexpr int kFindings = 1;  // input rejected, bad rows, archive violations
constexpr int kMissing = 2;   // missing or unreadable input, unknown ids, bad config
constexpr int kRefused = 3;   // non-private bind without override

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::BindRefused: return kRefused;
    case ErrorCode::MissingManifest:
    case ErrorCode::CorruptManifest:
    case ErrorCode::InvalidConfig:
    case ErrorCode::UnknownCase:
    case ErrorCode::UnknownLayer:
    case ErrorCode::UnknownCamera:
    case ErrorCode::UnknownScan:
    case ErrorCode::UnknownTrack:
    case ErrorCode::NotFound:
    case ErrorCode::CorruptStore:
    case ErrorCode::IoError: return kMissing;
    default: return kFindings;
  }
}

int fail(const Error& e) {
  std::cerr << "error [" << e.code_name() << "]: " << e.what() << "\n";
  return exit_code_for(e.code());
}

std::string read_file_or_throw(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::NotFound, "cannot read " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

// Runs one request against a headless service over the store at `root`.
// Returns the parsed body, or throws the service error.
json call(const fgis::api::Service& svc, fgis::api::Request req) {
  const auto res = svc.handle(req);
  json body = json::parse(res.body, nullptr, false);
  if (res.status >= 400) {
    const auto code_name = body.value("code", "NotFound");
    ErrorCode code = ErrorCode::NotFound;
    for (int c = 0; c <= static_cast<int>(ErrorCode::BindRefused); ++c) {
      if (fgis::code_name(static_cast<ErrorCode>(c)) == code_name) code = static_cast<ErrorCode>(c);
    }
    throw Error(code, body.value("message", "request failed"));
  }
  return body;
}

std::unique_ptr<fgis::api::Service> headless(const fs::path& store_root, bool lenient = false) {
  return std::make_unique<fgis::api::Service>(std::nullopt, fgis::store::EvidenceStore::open(store_root),
                                              fgis::api::ServiceOptions{lenient, std::nullopt});
}

// -------------------------------------------------------------------- serve

struct ServeArgs {
  std::string config;
  std::string bind;
  int port = -1;
  std::string tiles;
  std::string cases;
  long long cache_capacity = -1;
  bool lenient = false;
  bool allow_public_bind = false;
  std::string ui_root;
};

int run_serve(const ServeArgs& a) {
  try {
    fgis::api::ServiceConfig cfg;
    if (!a.config.empty()) {
      cfg = fgis::api::load_config(a.config);
    } else if (a.tiles.empty() || a.cases.empty()) {
      throw Error(ErrorCode::InvalidConfig, "give --config or both --tiles and --cases");
    }
    if (!a.bind.empty()) cfg.bind_address = a.bind;
    if (a.port >= 0) cfg.port = a.port;
    if (!a.tiles.empty()) cfg.tile_archive_path = a.tiles;
    if (!a.cases.empty()) cfg.case_root_path = a.cases;
    if (a.cache_capacity >= 0) cfg.cache_capacity = static_cast<std::size_t>(a.cache_capacity);
    if (a.lenient) cfg.lenient_import = true;
    if (a.allow_public_bind) cfg.allow_public_bind = true;
    if (!a.ui_root.empty()) cfg.ui_root_path = a.ui_root;
    fgis::api::validate_config(cfg);

    // Route SIGINT/SIGTERM to a watcher thread so shutdown is orderly.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    const auto service = fgis::api::Service::from_config(cfg);
    fgis::api::Server server(*service);
    const int port = server.bind(cfg.bind_address, cfg.port, cfg.allow_public_bind);
    const auto snap = service->store().snapshot();
    std::cout << "fgis listening on " << cfg.bind_address << " port " << port << " (tiles: "
              << service->tiles()->manifest().tile_count << ", cases: " << snap->cases().size() << ")"
              << std::endl;

    std::thread watcher([&server, signals] {
      int sig = 0;
      sigwait(&signals, &sig);
      server.stop();
    });
    server.run();
    // Wake the watcher if the server stopped on its own.
    pthread_kill(watcher.native_handle(), SIGTERM);
    watcher.join();
    std::cout << "fgis stopped" << std::endl;
    return kOk;
  } catch (const Error& e) {
    return fail(e);
  }
}

// ------------------------------------------------------------------- import

struct ImportArgs {
  std::string store;
  std::string case_id;
  std::string new_case;
  std::string format;
  std::string label;
  bool lenient = false;
  std::vector<std::string> files;
};

int run_import(const ImportArgs& a) {
  try {
    const auto svc = headless(a.store, a.lenient);
    std::string case_id = a.case_id;
    if (case_id.empty()) {
      const json c = call(*svc, {"POST", "/cases", {}, json{{"name", a.new_case}}.dump()});
      case_id = c["case_id"].get<std::string>();
      std::cout << "created " << case_id << "\n";
    }
    int status = kOk;
    for (const auto& file : a.files) {
      fgis::api::Request req{"POST", "/cases/" + case_id + "/import", {}, ""};
      req.query["format"] = a.format;
      req.query["label"] = a.label.empty() ? fs::path(file).filename().string() : a.label;
      req.query["lenient"] = a.lenient ? "true" : "false";
      try {
        req.body = read_file_or_throw(file);
        const json r = call(*svc, req);
        std::cout << file << ": ";
        if (r.contains("layer_id")) {
          std::cout << "1 layer, " << r["feature_count"] << " features (" << r["layer_id"].get<std::string>() << ")";
          if (r["skipped_count"].get<std::size_t>() > 0) {
            std::cout << ", " << r["skipped_count"] << " unsupported geometries skipped";
          }
          if (r.contains("track_ids") && !r["track_ids"].empty()) {
            std::cout << ", " << r["track_ids"].size() << " track(s)";
          }
        } else if (r.contains("scan_id")) {
          std::cout << "1 scan, " << r["observation_count"] << " observations ("
                    << r["scan_id"].get<std::string>() << ")";
        } else {
          std::cout << r["count"] << " records";
        }
        std::cout << "\n";
        if (r.contains("skipped_rows")) {
          for (const auto& s : r["skipped_rows"]) {
            std::cout << "  skipped row " << s["row"] << ": " << s["reason"].get<std::string>() << "\n";
          }
        }
      } catch (const Error& e) {
        std::cerr << file << ": ";
        status = std::max(status, fail(e));
      }
    }
    return status;
  } catch (const Error& e) {
    return fail(e);
  }
}

// ------------------------------------------------------------- verify-tiles

int run_verify(const std::string& path) {
  try {
    const auto archive = fgis::tiles::TileArchive::open(path, 0);
    const auto report = archive.verify();
    for (const auto& v : report.violations) {
      std::cout << fgis::tiles::kind_name(v.kind) << " " << (v.path.empty() ? "-" : v.path) << ": " << v.detail
                << "\n";
    }
    std::cout << report.tiles_found << " tile(s), " << report.violations.size() << " violation(s)\n";
    return report.clean() ? kOk : kFindings;
  } catch (const Error& e) {
    return fail(e);
  }
}

// ------------------------------------------------------------ gen-synthetic

int run_gen(const std::string& spec_path, const std::string& out_dir, std::optional<std::uint64_t> seed) {
  try {
    auto spec = fgis::synth::parse_spec(read_file_or_throw(spec_path));
    if (seed) spec.seed = *seed;
    const auto data = fgis::synth::generate(spec);
    fgis::synth::write_dataset(data, out_dir);
    for (const auto& [name, bytes] : data) std::cout << (fs::path(out_dir) / name).string() << " (" << bytes.size() << " bytes)\n";
    return kOk;
  } catch (const Error& e) {
    return fail(e);
  }
}

// -------------------------------------------------------------------- query

int run_query(const std::string& store, fgis::api::Request req) {
  try {
    const auto svc = headless(store);
    std::cout << call(*svc, std::move(req)).dump(2) << "\n";
    return kOk;
  } catch (const Error& e) {
    return fail(e);
  }
}

std::string fmt_number(double v) { return json(v).dump(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fgis: offline forensic GIS workbench"};
  app.require_subcommand(1);
  int status = kOk;

  ServeArgs serve;
  auto* s = app.add_subcommand("serve", "Run the HTTP service");
  s->add_option("--config", serve.config, "Service configuration JSON");
  s->add_option("--bind", serve.bind, "Bind address (IP literal)");
  s->add_option("--port", serve.port, "Port; 0 picks a free one")->check(CLI::Range(0, 65535));
  s->add_option("--tiles", serve.tiles, "Tile archive directory");
  s->add_option("--cases", serve.cases, "Evidence store directory");
  s->add_option("--cache-capacity", serve.cache_capacity, "Tile cache capacity (tiles)")->check(CLI::NonNegativeNumber);
  s->add_flag("--lenient", serve.lenient, "Lenient CSV imports by default");
  s->add_flag("--allow-public-bind", serve.allow_public_bind, "Permit a non-private bind address");
  s->add_option("--ui-root", serve.ui_root, "Directory of web client assets");
  s->callback([&] { status = run_serve(serve); });

  ImportArgs imp;
  auto* i = app.add_subcommand("import", "Import evidence files into a case");
  i->add_option("--store", imp.store, "Evidence store directory")->required();
  auto* case_opt = i->add_option("--case", imp.case_id, "Existing case id");
  auto* new_opt = i->add_option("--new-case", imp.new_case, "Create a case with this name");
  case_opt->excludes(new_opt);
  i->add_option("--format", imp.format, "gpx, kml, gml, geojson, wifi, anpr, bt or camera")
      ->required()
      ->check(CLI::IsMember({"gpx", "kml", "gml", "geojson", "wifi", "anpr", "bt", "camera"}));
  i->add_option("--label", imp.label, "Layer or scan label (default: file name)");
  i->add_flag("--lenient", imp.lenient, "Import good CSV rows and report bad ones");
  i->add_option("files", imp.files, "Files to import")->required();
  i->callback([&] {
    if (imp.case_id.empty() && imp.new_case.empty()) throw CLI::RequiredError("--case or --new-case");
    status = run_import(imp);
  });

  std::string tiles_path;
  auto* v = app.add_subcommand("verify-tiles", "Check a tile archive against its manifest");
  v->add_option("path", tiles_path, "Archive directory")->required();
  v->callback([&] { status = run_verify(tiles_path); });

  std::string spec_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  auto* g = app.add_subcommand("gen-synthetic", "Generate a seeded synthetic dataset");
  g->add_option("spec", spec_path, "Synthetic spec JSON")->required();
  g->add_option("out_dir", out_dir, "Output directory")->required();
  g->add_option("--seed", seed, "Override the spec seed");
  g->callback([&] { status = run_gen(spec_path, out_dir, seed); });

  auto* q = app.add_subcommand("query", "Run an analysis headlessly (same output as the HTTP API)");
  q->require_subcommand(1);
  std::string store;
  q->add_option("--store", store, "Evidence store directory")->required();

  double lat = 0, lon = 0, radius = 0;
  std::string exclude;
  auto* qc = q->add_subcommand("cameras", "Cameras within a radius");
  qc->add_option("--lat", lat)->required();
  qc->add_option("--lon", lon)->required();
  qc->add_option("--radius-m", radius)->required();
  qc->add_option("--exclude", exclude, "Comma-separated categories to hide");
  qc->callback([&] {
    fgis::api::Request r{"GET", "/cameras", {}, ""};
    r.query = {{"lat", fmt_number(lat)}, {"lon", fmt_number(lon)}, {"radius_m", fmt_number(radius)}};
    if (!exclude.empty()) r.query["exclude"] = exclude;
    status = run_query(store, r);
  });

  std::string bssid;
  auto* qb = q->add_subcommand("bssid", "Observations of a MAC or OUI prefix");
  qb->add_option("query", bssid)->required();
  qb->callback([&] { status = run_query(store, {"GET", "/analysis/bssid/" + bssid, {}, ""}); });

  std::string track;
  double epsilon = 50.0, tau = 300.0;
  auto* qs = q->add_subcommand("stops", "Stop segments of a track");
  qs->add_option("--track", track)->required();
  qs->add_option("--epsilon-m", epsilon, "Stop radius (m)");
  qs->add_option("--tau-s", tau, "Minimum dwell (s)");
  qs->callback([&] {
    const json body{{"track_id", track}, {"epsilon_m", epsilon}, {"tau_s", tau}};
    status = run_query(store, {"POST", "/analysis/stops", {}, body.dump()});
  });

  double dt = 60.0, dm = 100.0;
  auto* qr = q->add_subcommand("correlate", "Rank Bluetooth MAC / plate associations");
  qr->add_option("--dt-s", dt, "Time window (s)");
  qr->add_option("--d-m", dm, "Distance window (m)");
  qr->callback([&] {
    const json body{{"dt_s", dt}, {"d_m", dm}};
    status = run_query(store, {"POST", "/analysis/correlate", {}, body.dump()});
  });

  CLI11_PARSE(app, argc, argv);
  return status;
}
