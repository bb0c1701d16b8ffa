#include "fgis/evidence_store.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>

#include "fgis/error.hpp"
#include "fgis/ingest.hpp"
#include "store/atomic_file.hpp"
#include "store/record_codec.hpp"

namespace fgis::store {
namespace fs = std::filesystem;
using codec::json;

namespace {

Timestamp now_ms() {
  return std::chrono::time_point_cast<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

std::string numbered(std::string_view prefix, std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04zu", n);
  return std::string(prefix) + "-" + buf;
}

// Parses "prefix-NNNN" and returns NNNN.
std::size_t sequence_of(std::string_view id, std::string_view prefix) {
  if (id.size() <= prefix.size() + 1 || id.substr(0, prefix.size()) != prefix ||
      id[prefix.size()] != '-') {
    return 0;
  }
  std::size_t n = 0;
  for (char c : id.substr(prefix.size() + 1)) {
    if (c < '0' || c > '9') return 0;
    n = n * 10 + static_cast<std::size_t>(c - '0');
  }
  return n;
}

[[noreturn]] void corrupt(const std::string& where, const std::string& why) {
  throw Error(ErrorCode::CorruptStore, where + ": " + why);
}

std::vector<json> read_jsonl(const fs::path& p, const std::string& where) {
  const auto text = detail::read_whole_file(p);
  if (!text) corrupt(where, "missing file");
  std::vector<json> lines;
  std::size_t pos = 0;
  while (pos < text->size()) {
    std::size_t nl = text->find('\n', pos);
    if (nl == std::string::npos) corrupt(where, "unterminated final line");
    const std::string_view line(text->data() + pos, nl - pos);
    pos = nl + 1;
    if (line.empty()) continue;
    json j = json::parse(line.begin(), line.end(), nullptr, false);
    if (j.is_discarded()) corrupt(where, "line is not JSON");
    lines.push_back(std::move(j));
  }
  return lines;
}

std::vector<std::string> string_list(const json& doc, const char* field, const std::string& where) {
  const auto it = doc.find(field);
  if (it == doc.end() || !it->is_array()) corrupt(where, std::string("'") + field + "' missing");
  std::vector<std::string> out;
  for (const auto& v : *it) {
    if (!v.is_string() || !is_valid_id(v.get<std::string>())) corrupt(where, "bad id list");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::size_t count_field(const json& doc, const char* field, const std::string& where) {
  const auto it = doc.find(field);
  if (it == doc.end()) return 0;
  if (!it->is_number_unsigned()) corrupt(where, std::string("'") + field + "' is not a count");
  return it->get<std::size_t>();
}

template <typename T>
std::string jsonl_of(const std::vector<T>& items) {
  std::string out;
  for (const auto& item : items) {
    out += codec::to_json(item).dump();
    out += '\n';
  }
  return out;
}

template <typename T>
std::vector<T> concat_by_case(const std::vector<CaseRecord>& cases,
                              const std::map<std::string, std::shared_ptr<const std::vector<T>>, std::less<>>& per_case) {
  std::vector<T> all;
  for (const auto& c : cases) {
    if (auto it = per_case.find(c.case_id); it != per_case.end()) {
      all.insert(all.end(), it->second->begin(), it->second->end());
    }
  }
  return all;
}

}  // namespace

bool is_valid_id(std::string_view id) noexcept {
  if (id.empty() || id.size() > 64) return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' ||
           c == '-';
  });
}

// ------------------------------------------------------------------ cameras

CameraRegistry::CameraRegistry(std::vector<CameraRecord> cameras, double cell_size_deg)
    : cameras_(std::move(cameras)), index_(cell_size_deg) {
  std::sort(cameras_.begin(), cameras_.end(),
            [](const CameraRecord& a, const CameraRecord& b) { return a.camera_id < b.camera_id; });
  for (std::size_t i = 0; i < cameras_.size(); ++i) index_.insert(i, cameras_[i].position);
}

const CameraRecord* CameraRegistry::find(std::string_view camera_id) const {
  const auto it = std::lower_bound(
      cameras_.begin(), cameras_.end(), camera_id,
      [](const CameraRecord& c, std::string_view id) { return c.camera_id < id; });
  if (it == cameras_.end() || it->camera_id != camera_id) return nullptr;
  return &*it;
}

std::vector<CameraHit> CameraRegistry::query(const GeoPoint& center, double radius_m,
                                             const std::set<CameraCategory>& excluded) const {
  if (!(radius_m >= 0.0)) {
    throw Error(ErrorCode::InvalidParameters, "radius must be a non-negative number of meters");
  }
  std::vector<CameraHit> hits;
  for (const auto id : index_.query_radius(center, radius_m)) {
    const auto& cam = cameras_[id];
    if (excluded.contains(cam.category)) continue;
    hits.push_back({cam, haversine_distance(center, cam.position)});
  }
  std::sort(hits.begin(), hits.end(), [](const CameraHit& a, const CameraHit& b) {
    if (a.distance_m != b.distance_m) return a.distance_m < b.distance_m;
    return a.camera.camera_id < b.camera.camera_id;
  });
  return hits;
}

// ----------------------------------------------------------------- snapshot

std::size_t Snapshot::case_index(std::string_view case_id) const {
  for (std::size_t i = 0; i < cases_.size(); ++i) {
    if (cases_[i].case_id == case_id) return i;
  }
  throw Error(ErrorCode::UnknownCase, "no case '" + std::string(case_id) + "'");
}

const CaseRecord& Snapshot::get_case(std::string_view case_id) const {
  return cases_[case_index(case_id)];
}

std::vector<LayerInfo> Snapshot::list_layers(std::string_view case_id) const {
  const auto& c = get_case(case_id);
  std::vector<LayerInfo> out;
  for (const auto& lid : c.layer_ids) {
    const auto& e = layers_.at(LayerKey{c.case_id, lid});
    out.push_back({lid, e.label, e.features->features.size(), e.features->provenance});
  }
  return out;
}

const FeatureSet& Snapshot::get_layer(std::string_view case_id, std::string_view layer_id) const {
  const auto& c = get_case(case_id);
  const auto it = layers_.find(LayerKey{c.case_id, std::string(layer_id)});
  if (it == layers_.end()) {
    throw Error(ErrorCode::UnknownLayer, "case '" + c.case_id + "' has no layer '" + std::string(layer_id) + "'");
  }
  return *it->second.features;
}

const std::string& Snapshot::layer_label(std::string_view case_id, std::string_view layer_id) const {
  get_layer(case_id, layer_id);
  return layers_.find(LayerKey{std::string(case_id), std::string(layer_id)})->second.label;
}

const CameraRecord& Snapshot::get_camera(std::string_view camera_id) const {
  if (const auto* c = cameras_->find(camera_id)) return *c;
  throw Error(ErrorCode::UnknownCamera, "no camera '" + std::string(camera_id) + "'");
}

std::vector<CameraHit> Snapshot::query_cameras(const GeoPoint& center, double radius_m,
                                               const std::set<CameraCategory>& excluded) const {
  return cameras_->query(center, radius_m, excluded);
}

const WifiScan& Snapshot::get_scan(std::string_view scan_id) const {
  for (const auto& s : *scans_) {
    if (s.scan_id == scan_id) return s;
  }
  throw Error(ErrorCode::UnknownScan, "no scan '" + std::string(scan_id) + "'");
}

const GpsTrack& Snapshot::get_track(std::string_view track_id) const {
  const auto it = tracks_.find(track_id);
  if (it == tracks_.end()) throw Error(ErrorCode::UnknownTrack, "no track '" + std::string(track_id) + "'");
  return *it->second;
}

std::vector<std::string> Snapshot::track_ids() const {
  std::vector<std::string> out;
  for (const auto& c : cases_) out.insert(out.end(), c.track_ids.begin(), c.track_ids.end());
  return out;
}

// -------------------------------------------------------------------- store

EvidenceStore::EvidenceStore(fs::path root) : root_(std::move(root)) {}

std::unique_ptr<EvidenceStore> EvidenceStore::open(const fs::path& root) {
  std::error_code ec;
  fs::create_directories(root / "cases", ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create the evidence store directory");
  std::unique_ptr<EvidenceStore> store(new EvidenceStore(root));
  store->load();
  return store;
}

fs::path EvidenceStore::case_dir(std::string_view case_id) const {
  return root_ / "cases" / std::string(case_id);
}

std::shared_ptr<const Snapshot> EvidenceStore::snapshot() const {
  std::lock_guard lock(snapshot_mu_);
  return current_;
}

void EvidenceStore::publish(std::shared_ptr<const Snapshot> next) {
  std::lock_guard lock(snapshot_mu_);
  current_ = std::move(next);
}

void EvidenceStore::load() {
  std::error_code ec;
  std::vector<fs::path> stray;
  for (fs::recursive_directory_iterator it(root_, ec), end; !ec && it != end; it.increment(ec)) {
    if (it->is_regular_file() && detail::is_temp_file(it->path())) stray.push_back(it->path());
  }
  for (const auto& p : stray) fs::remove(p, ec);

  auto snap = std::make_shared<Snapshot>();

  if (fs::exists(root_ / "cameras.jsonl")) {
    std::map<std::string, CameraRecord> latest;
    for (const auto& j : read_jsonl(root_ / "cameras.jsonl", "cameras.jsonl")) {
      auto cam = codec::camera_from_json(j);
      latest.insert_or_assign(cam.camera_id, std::move(cam));
    }
    std::vector<CameraRecord> cams;
    for (auto& [id, cam] : latest) cams.push_back(std::move(cam));
    snap->cameras_ = std::make_shared<const CameraRegistry>(std::move(cams));
  }

  std::vector<WifiScan> scans;
  for (fs::directory_iterator it(root_ / "cases", ec), end; !ec && it != end; it.increment(ec)) {
    if (!it->is_directory()) continue;
    const fs::path dir = it->path();
    const std::string where = "case " + dir.filename().string();
    const auto text = detail::read_whole_file(dir / "manifest.json");
    if (!text) continue;  // created but never committed
    const json doc = json::parse(*text, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) corrupt(where, "manifest is not a JSON object");

    CaseRecord c;
    if (!doc.contains("case_id") || !doc["case_id"].is_string()) corrupt(where, "manifest lacks case_id");
    c.case_id = doc["case_id"].get<std::string>();
    if (c.case_id != dir.filename().string()) corrupt(where, "case_id does not match directory");
    if (!doc.contains("name") || !doc["name"].is_string()) corrupt(where, "manifest lacks name");
    c.name = doc["name"].get<std::string>();
    c.created_at = codec::time_from_json(doc, "created_at");
    c.layer_ids = string_list(doc, "layer_ids", where);
    c.scan_ids = string_list(doc, "scan_ids", where);
    c.track_ids = string_list(doc, "track_ids", where);

    const json labels = doc.value("layer_labels", json::object());
    for (const auto& lid : c.layer_ids) {
      const auto bytes = detail::read_whole_file(dir / "layers" / (lid + ".geojson"));
      if (!bytes) corrupt(where, "layer " + lid + " missing");
      auto fs_ptr = std::make_shared<const FeatureSet>(ingest::read_layer_document(*bytes));
      std::string label = labels.contains(lid) && labels[lid].is_string() ? labels[lid].get<std::string>() : "";
      snap->layers_.emplace(Snapshot::LayerKey{c.case_id, lid}, Snapshot::LayerEntry{label, fs_ptr});
    }

    for (const auto& sid : c.scan_ids) {
      const auto lines = read_jsonl(dir / "scans" / (sid + ".jsonl"), where + " scan " + sid);
      if (lines.empty()) corrupt(where, "scan " + sid + " is empty");
      WifiScan s;
      const json& head = lines.front();
      if (!head.contains("scan_id") || head["scan_id"] != sid) corrupt(where, "scan header mismatch");
      s.scan_id = sid;
      s.label = head.value("label", "");
      s.captured_from = codec::time_from_json(head, "captured_from");
      s.captured_to = codec::time_from_json(head, "captured_to");
      const std::size_t n = count_field(head, "observation_count", where);
      if (lines.size() - 1 != n) corrupt(where, "scan " + sid + " is truncated");
      for (std::size_t i = 1; i < lines.size(); ++i) s.observations.push_back(codec::observation_from_json(lines[i]));
      scans.push_back(std::move(s));
    }

    for (const auto& tid : c.track_ids) {
      const auto lines = read_jsonl(dir / "tracks" / (tid + ".jsonl"), where + " track " + tid);
      if (lines.empty()) corrupt(where, "track " + tid + " is empty");
      GpsTrack t;
      const json& head = lines.front();
      if (!head.contains("track_id") || head["track_id"] != tid) corrupt(where, "track header mismatch");
      t.track_id = tid;
      t.label = head.value("label", "");
      const std::size_t n = count_field(head, "point_count", where);
      if (lines.size() - 1 != n) corrupt(where, "track " + tid + " is truncated");
      for (std::size_t i = 1; i < lines.size(); ++i) t.points.push_back(codec::track_point_from_json(lines[i]));
      snap->tracks_.emplace(tid, std::make_shared<const GpsTrack>(std::move(t)));
    }

    // Detection files may hold lines past the committed count when a later
    // write was interrupted between the file rename and the manifest rename.
    const std::size_t n_bt = count_field(doc, "bt_count", where);
    const std::size_t n_anpr = count_field(doc, "anpr_count", where);
    if (n_bt > 0) {
      const auto lines = read_jsonl(dir / "detections_bt.jsonl", where + " bt detections");
      if (lines.size() < n_bt) corrupt(where, "bt detections truncated");
      std::vector<BtDetection> v;
      for (std::size_t i = 0; i < n_bt; ++i) v.push_back(codec::bt_from_json(lines[i]));
      snap->bt_by_case_[c.case_id] = std::make_shared<const std::vector<BtDetection>>(std::move(v));
    }
    if (n_anpr > 0) {
      const auto lines = read_jsonl(dir / "detections_anpr.jsonl", where + " anpr detections");
      if (lines.size() < n_anpr) corrupt(where, "anpr detections truncated");
      std::vector<AnprDetection> v;
      for (std::size_t i = 0; i < n_anpr; ++i) v.push_back(codec::anpr_from_json(lines[i]));
      snap->anpr_by_case_[c.case_id] = std::make_shared<const std::vector<AnprDetection>>(std::move(v));
    }
    snap->cases_.push_back(std::move(c));
  }
  if (ec) throw Error(ErrorCode::IoError, "cannot list the case directory");

  std::sort(snap->cases_.begin(), snap->cases_.end(), [](const CaseRecord& a, const CaseRecord& b) {
    if (a.created_at != b.created_at) return a.created_at < b.created_at;
    return a.case_id < b.case_id;
  });
  // Scans in case order, then per-case insertion order.
  std::vector<WifiScan> ordered;
  for (const auto& c : snap->cases_) {
    for (const auto& sid : c.scan_ids) {
      auto it = std::find_if(scans.begin(), scans.end(), [&](const WifiScan& s) { return s.scan_id == sid; });
      ordered.push_back(std::move(*it));
      scans.erase(it);
    }
  }
  snap->scans_ = std::make_shared<const std::vector<WifiScan>>(std::move(ordered));
  snap->bt_ = std::make_shared<const std::vector<BtDetection>>(concat_by_case(snap->cases_, snap->bt_by_case_));
  snap->anpr_ =
      std::make_shared<const std::vector<AnprDetection>>(concat_by_case(snap->cases_, snap->anpr_by_case_));
  publish(std::move(snap));
}

void EvidenceStore::write_case_manifest(const Snapshot& s, const CaseRecord& c) const {
  nlohmann::ordered_json doc;
  doc["case_id"] = c.case_id;
  doc["name"] = c.name;
  doc["created_at"] = format_iso8601(c.created_at);
  doc["layer_ids"] = c.layer_ids;
  nlohmann::ordered_json labels = nlohmann::ordered_json::object();
  for (const auto& lid : c.layer_ids) {
    if (auto it = s.layers_.find(Snapshot::LayerKey{c.case_id, lid}); it != s.layers_.end()) {
      labels[lid] = it->second.label;
    }
  }
  doc["layer_labels"] = labels;
  doc["scan_ids"] = c.scan_ids;
  doc["track_ids"] = c.track_ids;
  const auto bt = s.bt_by_case_.find(c.case_id);
  const auto anpr = s.anpr_by_case_.find(c.case_id);
  doc["bt_count"] = bt == s.bt_by_case_.end() ? 0 : bt->second->size();
  doc["anpr_count"] = anpr == s.anpr_by_case_.end() ? 0 : anpr->second->size();
  detail::write_atomic(case_dir(c.case_id) / "manifest.json", doc.dump(2) + "\n");
}

CaseRecord EvidenceStore::create_case(const std::string& name) {
  std::lock_guard w(write_mu_);
  const auto cur = snapshot();
  std::size_t next = 1;
  for (const auto& c : cur->cases_) next = std::max(next, sequence_of(c.case_id, "case") + 1);
  std::error_code ec;
  while (fs::exists(case_dir(numbered("case", next)) / "manifest.json", ec)) ++next;

  CaseRecord c;
  c.case_id = numbered("case", next);
  c.name = name;
  c.created_at = now_ms();
  auto snap = std::make_shared<Snapshot>(*cur);
  snap->cases_.push_back(c);
  write_case_manifest(*snap, c);
  publish(std::move(snap));
  return c;
}

std::string EvidenceStore::add_layer(std::string_view case_id, const FeatureSet& features,
                                     const std::string& label) {
  std::lock_guard w(write_mu_);
  const auto cur = snapshot();
  const std::size_t ci = cur->case_index(case_id);
  auto snap = std::make_shared<Snapshot>(*cur);
  CaseRecord& c = snap->cases_[ci];

  std::size_t next = 1;
  for (const auto& lid : c.layer_ids) next = std::max(next, sequence_of(lid, "layer") + 1);
  const std::string layer_id = numbered("layer", next);

  const std::string doc = ingest::export_geojson(features, ingest::GeoJsonOptions{std::nullopt});
  detail::write_atomic(case_dir(c.case_id) / "layers" / (layer_id + ".geojson"), doc);
  // Decode what was written so the snapshot holds exactly the stored value.
  auto stored = std::make_shared<const FeatureSet>(ingest::read_layer_document(doc));
  c.layer_ids.push_back(layer_id);
  snap->layers_.insert_or_assign(Snapshot::LayerKey{c.case_id, layer_id}, Snapshot::LayerEntry{label, stored});
  write_case_manifest(*snap, c);
  publish(std::move(snap));
  return layer_id;
}

std::size_t EvidenceStore::upsert_cameras(std::span<const CameraRecord> cameras) {
  std::lock_guard w(write_mu_);
  if (cameras.empty()) return 0;
  const auto cur = snapshot();
  const fs::path path = root_ / "cameras.jsonl";
  std::string text = detail::read_whole_file(path).value_or("");
  std::map<std::string, CameraRecord> merged;
  for (const auto& cam : cur->cameras_->cameras()) merged.emplace(cam.camera_id, cam);
  for (const auto& cam : cameras) {
    if (cam.camera_id.empty()) throw Error(ErrorCode::InvalidId, "camera_id must not be empty");
    text += codec::to_json(cam).dump();
    text += '\n';
    merged.insert_or_assign(cam.camera_id, cam);
  }
  detail::write_atomic(path, text);
  std::vector<CameraRecord> all;
  for (auto& [id, cam] : merged) all.push_back(std::move(cam));
  auto snap = std::make_shared<Snapshot>(*cur);
  snap->cameras_ = std::make_shared<const CameraRegistry>(std::move(all));
  publish(std::move(snap));
  return cameras.size();
}

std::string EvidenceStore::store_scan(std::string_view case_id, WifiScan scan) {
  std::lock_guard w(write_mu_);
  const auto cur = snapshot();
  const std::size_t ci = cur->case_index(case_id);
  const auto taken = [&](const std::string& id) {
    return std::any_of(cur->scans_->begin(), cur->scans_->end(), [&](const WifiScan& s) { return s.scan_id == id; });
  };
  if (scan.scan_id.empty()) {
    std::size_t next = cur->scans_->size() + 1;
    while (taken(numbered("scan", next))) ++next;
    scan.scan_id = numbered("scan", next);
  } else if (!is_valid_id(scan.scan_id)) {
    throw Error(ErrorCode::InvalidId, "scan id must match [A-Za-z0-9_-]{1,64}");
  } else if (taken(scan.scan_id)) {
    throw Error(ErrorCode::DuplicateId, "scan '" + scan.scan_id + "' already exists");
  }
  scan.derive_capture_range();

  json head;
  head["scan_id"] = scan.scan_id;
  head["label"] = scan.label;
  head["captured_from"] = format_iso8601(scan.captured_from);
  head["captured_to"] = format_iso8601(scan.captured_to);
  head["observation_count"] = scan.observations.size();
  std::string text = head.dump() + "\n" + jsonl_of(scan.observations);

  auto snap = std::make_shared<Snapshot>(*cur);
  CaseRecord& c = snap->cases_[ci];
  detail::write_atomic(case_dir(c.case_id) / "scans" / (scan.scan_id + ".jsonl"), text);
  c.scan_ids.push_back(scan.scan_id);
  std::vector<WifiScan> scans;
  scans.reserve(cur->scans_->size() + 1);
  // Keep case order: insert after the last scan of this case or of any earlier case.
  std::size_t insert_at = 0;
  for (std::size_t k = 0; k <= ci; ++k) insert_at += cur->cases_[k].scan_ids.size();
  scans.insert(scans.end(), cur->scans_->begin(), cur->scans_->begin() + static_cast<std::ptrdiff_t>(insert_at));
  scans.push_back(scan);
  scans.insert(scans.end(), cur->scans_->begin() + static_cast<std::ptrdiff_t>(insert_at), cur->scans_->end());
  snap->scans_ = std::make_shared<const std::vector<WifiScan>>(std::move(scans));
  write_case_manifest(*snap, c);
  const std::string id = scan.scan_id;
  publish(std::move(snap));
  return id;
}

std::string EvidenceStore::store_track(std::string_view case_id, GpsTrack track) {
  std::lock_guard w(write_mu_);
  const auto cur = snapshot();
  const std::size_t ci = cur->case_index(case_id);
  if (track.points.empty()) throw Error(ErrorCode::InvalidParameters, "a track needs at least one point");
  if (!track.timestamps_monotonic()) {
    throw Error(ErrorCode::InvalidParameters, "track timestamps must be non-decreasing");
  }
  if (track.track_id.empty()) {
    std::size_t next = cur->tracks_.size() + 1;
    while (cur->tracks_.contains(numbered("track", next))) ++next;
    track.track_id = numbered("track", next);
  } else if (!is_valid_id(track.track_id)) {
    throw Error(ErrorCode::InvalidId, "track id must match [A-Za-z0-9_-]{1,64}");
  } else if (cur->tracks_.contains(track.track_id)) {
    throw Error(ErrorCode::DuplicateId, "track '" + track.track_id + "' already exists");
  }

  json head;
  head["track_id"] = track.track_id;
  head["label"] = track.label;
  head["point_count"] = track.points.size();
  const std::string text = head.dump() + "\n" + jsonl_of(track.points);

  auto snap = std::make_shared<Snapshot>(*cur);
  CaseRecord& c = snap->cases_[ci];
  detail::write_atomic(case_dir(c.case_id) / "tracks" / (track.track_id + ".jsonl"), text);
  c.track_ids.push_back(track.track_id);
  const std::string id = track.track_id;
  snap->tracks_.emplace(id, std::make_shared<const GpsTrack>(std::move(track)));
  write_case_manifest(*snap, c);
  publish(std::move(snap));
  return id;
}

std::size_t EvidenceStore::store_bt_detections(std::string_view case_id,
                                               std::span<const BtDetection> detections) {
  std::lock_guard w(write_mu_);
  const auto cur = snapshot();
  const std::size_t ci = cur->case_index(case_id);
  auto snap = std::make_shared<Snapshot>(*cur);
  const CaseRecord& c = snap->cases_[ci];
  std::vector<BtDetection> v;
  if (auto it = cur->bt_by_case_.find(c.case_id); it != cur->bt_by_case_.end()) v = *it->second;
  v.insert(v.end(), detections.begin(), detections.end());
  detail::write_atomic(case_dir(c.case_id) / "detections_bt.jsonl", jsonl_of(v));
  snap->bt_by_case_[c.case_id] = std::make_shared<const std::vector<BtDetection>>(std::move(v));
  snap->bt_ = std::make_shared<const std::vector<BtDetection>>(concat_by_case(snap->cases_, snap->bt_by_case_));
  write_case_manifest(*snap, c);
  publish(std::move(snap));
  return detections.size();
}

std::size_t EvidenceStore::store_anpr_detections(std::string_view case_id,
                                                 std::span<const AnprDetection> detections) {
  std::lock_guard w(write_mu_);
  const auto cur = snapshot();
  const std::size_t ci = cur->case_index(case_id);
  auto snap = std::make_shared<Snapshot>(*cur);
  const CaseRecord& c = snap->cases_[ci];
  std::vector<AnprDetection> v;
  if (auto it = cur->anpr_by_case_.find(c.case_id); it != cur->anpr_by_case_.end()) v = *it->second;
  v.insert(v.end(), detections.begin(), detections.end());
  detail::write_atomic(case_dir(c.case_id) / "detections_anpr.jsonl", jsonl_of(v));
  snap->anpr_by_case_[c.case_id] = std::make_shared<const std::vector<AnprDetection>>(std::move(v));
  snap->anpr_ =
      std::make_shared<const std::vector<AnprDetection>>(concat_by_case(snap->cases_, snap->anpr_by_case_));
  write_case_manifest(*snap, c);
  publish(std::move(snap));
  return detections.size();
}

}  // namespace fgis::store
