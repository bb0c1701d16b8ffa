#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "fgis/feature.hpp"
#include "fgis/grid_index.hpp"
#include "fgis/records.hpp"

namespace fgis::store {

struct CaseRecord {
  std::string case_id;
  std::string name;
  Timestamp created_at{};
  std::vector<std::string> layer_ids;  // insertion order
  std::vector<std::string> scan_ids;
  std::vector<std::string> track_ids;

  friend bool operator==(const CaseRecord&, const CaseRecord&) = default;
};

struct LayerInfo {
  std::string layer_id;
  std::string label;
  std::size_t feature_count = 0;
  Provenance provenance;
};

struct CameraHit {
  CameraRecord camera;
  double distance_m = 0.0;
};

// Cameras sorted by id with a spatial index over their positions.
class CameraRegistry {
 public:
  CameraRegistry() = default;
  explicit CameraRegistry(std::vector<CameraRecord> cameras, double cell_size_deg = 0.01);

  const std::vector<CameraRecord>& cameras() const noexcept { return cameras_; }
  const CameraRecord* find(std::string_view camera_id) const;

  // Cameras with haversine distance <= radius_m whose category is not
  // excluded, by distance then camera_id.
  std::vector<CameraHit> query(const GeoPoint& center, double radius_m,
                               const std::set<CameraCategory>& excluded) const;

 private:
  std::vector<CameraRecord> cameras_;
  GridIndex index_;
};

// Immutable view of the whole store at one instant. Readers grab one with
// EvidenceStore::snapshot() at request start and never observe later writes.
class Snapshot {
 public:
  const std::vector<CaseRecord>& cases() const noexcept { return cases_; }
  // Throws Error(UnknownCase).
  const CaseRecord& get_case(std::string_view case_id) const;

  // Throws Error(UnknownCase) / Error(UnknownLayer).
  std::vector<LayerInfo> list_layers(std::string_view case_id) const;
  const FeatureSet& get_layer(std::string_view case_id, std::string_view layer_id) const;
  const std::string& layer_label(std::string_view case_id, std::string_view layer_id) const;

  const CameraRegistry& cameras() const noexcept { return *cameras_; }
  // Throws Error(UnknownCamera).
  const CameraRecord& get_camera(std::string_view camera_id) const;
  std::vector<CameraHit> query_cameras(const GeoPoint& center, double radius_m,
                                       const std::set<CameraCategory>& excluded) const;

  // All scans in insertion order across cases. Throws Error(UnknownScan).
  const std::vector<WifiScan>& scans() const noexcept { return *scans_; }
  const WifiScan& get_scan(std::string_view scan_id) const;

  // Throws Error(UnknownTrack).
  const GpsTrack& get_track(std::string_view track_id) const;
  std::vector<std::string> track_ids() const;

  const std::vector<BtDetection>& bt_detections() const noexcept { return *bt_; }
  const std::vector<AnprDetection>& anpr_detections() const noexcept { return *anpr_; }

 private:
  friend class EvidenceStore;

  struct LayerEntry {
    std::string label;
    std::shared_ptr<const FeatureSet> features;
  };
  using LayerKey = std::pair<std::string, std::string>;

  std::vector<CaseRecord> cases_;
  std::map<LayerKey, LayerEntry, std::less<>> layers_;
  std::shared_ptr<const CameraRegistry> cameras_ = std::make_shared<CameraRegistry>();
  std::shared_ptr<const std::vector<WifiScan>> scans_ = std::make_shared<std::vector<WifiScan>>();
  std::map<std::string, std::shared_ptr<const GpsTrack>, std::less<>> tracks_;
  std::shared_ptr<const std::vector<BtDetection>> bt_ = std::make_shared<std::vector<BtDetection>>();
  std::shared_ptr<const std::vector<AnprDetection>> anpr_ =
      std::make_shared<std::vector<AnprDetection>>();
  std::map<std::string, std::shared_ptr<const std::vector<BtDetection>>, std::less<>> bt_by_case_;
  std::map<std::string, std::shared_ptr<const std::vector<AnprDetection>>, std::less<>> anpr_by_case_;

  std::size_t case_index(std::string_view case_id) const;
};

// Case-scoped evidence persistence.
//
// Layout under the root directory:
//   cameras.jsonl                         department-wide camera registry
//   cases/<case_id>/manifest.json         case record; commit point
//   cases/<case_id>/layers/<id>.geojson
//   cases/<case_id>/scans/<id>.jsonl
//   cases/<case_id>/tracks/<id>.jsonl
//   cases/<case_id>/detections_bt.jsonl
//   cases/<case_id>/detections_anpr.jsonl
//
// Every file is replaced by write-to-temp + fsync + rename; JSON-lines files
// only ever grow. Entity files become visible once the case manifest names
// them, so an interrupted write leaves the store in its pre-write state.
// One writer at a time; reads go through immutable snapshots.
class EvidenceStore {
 public:
  // Opens (creating if needed) the store at `root`. Leftover temp files from
  // interrupted writes are removed. Throws Error(CorruptStore) when a
  // committed file does not decode.
  static std::unique_ptr<EvidenceStore> open(const std::filesystem::path& root);

  std::shared_ptr<const Snapshot> snapshot() const;
  const std::filesystem::path& root() const noexcept { return root_; }

  CaseRecord create_case(const std::string& name);

  // Returns the new layer id. Throws Error(UnknownCase).
  std::string add_layer(std::string_view case_id, const FeatureSet& features, const std::string& label);

  // Upsert by camera_id, last write wins. Returns the number of records
  // written.
  std::size_t upsert_cameras(std::span<const CameraRecord> cameras);

  // An empty scan_id/track_id is assigned by the store. Throws
  // Error(DuplicateId) when the id is taken anywhere in the store,
  // Error(InvalidId) for ids that are not [A-Za-z0-9_-]{1,64}.
  std::string store_scan(std::string_view case_id, WifiScan scan);
  std::string store_track(std::string_view case_id, GpsTrack track);

  std::size_t store_bt_detections(std::string_view case_id, std::span<const BtDetection> detections);
  std::size_t store_anpr_detections(std::string_view case_id,
                                    std::span<const AnprDetection> detections);

 private:
  explicit EvidenceStore(std::filesystem::path root);

  void load();
  void publish(std::shared_ptr<const Snapshot> next);
  void write_case_manifest(const Snapshot& s, const CaseRecord& c) const;
  std::filesystem::path case_dir(std::string_view case_id) const;

  std::filesystem::path root_;
  mutable std::mutex snapshot_mu_;
  std::shared_ptr<const Snapshot> current_;
  std::mutex write_mu_;
};

// True for ids safe to use as file names: [A-Za-z0-9_-]{1,64}.
bool is_valid_id(std::string_view id) noexcept;

namespace testing {
// Simulates a crash: the (skip_writes+1)-th atomic file write from now stops
// after `partial_bytes` bytes of its temp file, never renames, and throws
// Error(IoError). Cleared once it fires.
void arm_write_fault(std::size_t skip_writes, std::size_t partial_bytes);
void disarm_write_fault();
}  // namespace testing

}  // namespace fgis::store
