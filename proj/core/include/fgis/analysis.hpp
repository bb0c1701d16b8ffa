#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fgis/geo.hpp"
#include "fgis/mac_address.hpp"
#include "fgis/records.hpp"
#include "fgis/time.hpp"

namespace fgis::analysis {

// ---------------------------------------------------------------- Wi-Fi

struct SsidChange {
  std::optional<std::string> old_ssid;
  std::optional<std::string> new_ssid;
  friend bool operator==(const SsidChange&, const SsidChange&) = default;
};

// BSSID-keyed comparison of two scans. The four key sets partition the union
// of both scans' BSSIDs.
struct ScanDiff {
  std::set<MacAddress> added;      // only in B
  std::set<MacAddress> removed;    // only in A
  std::map<MacAddress, SsidChange> renamed;
  std::set<MacAddress> unchanged;

  friend bool operator==(const ScanDiff&, const ScanDiff&) = default;
};

// A BSSID seen with several SSIDs inside one scan is represented by its most
// recent observation (ties broken by later position in the scan). A hidden
// network becoming named, or the reverse, counts as a rename.
ScanDiff diff_scans(const WifiScan& a, const WifiScan& b);

// The most recent SSID per BSSID, as used by diff_scans.
std::map<MacAddress, std::optional<std::string>> latest_ssids(const WifiScan& scan);

struct ObservationHit {
  std::string scan_id;
  WifiObservation observation;
  friend bool operator==(const ObservationHit&, const ObservationHit&) = default;
};

using BssidQuery = std::variant<MacAddress, OuiPrefix>;

// Full MAC or 3-octet OUI prefix; throws Error(MalformedQuery) otherwise.
BssidQuery parse_bssid_query(std::string_view text);

// Every observation across `scans` whose BSSID equals the MAC or starts with
// the prefix, ordered by (timestamp, scan_id, position within scan).
std::vector<ObservationHit> search_bssid(const BssidQuery& query, std::span<const WifiScan> scans);

struct PresenceEvidence {
  MacAddress bssid;
  GeoPoint position;
  Timestamp timestamp{};
  std::string scan_id;
  std::optional<std::string> ssid;
  friend bool operator==(const PresenceEvidence&, const PresenceEvidence&) = default;
};

// One row per observation of any known BSSID, in the same order as
// search_bssid. Equivalent to the merged per-MAC searches.
std::vector<PresenceEvidence> presence_report(const std::set<MacAddress>& known_bssids,
                                              std::span<const WifiScan> scans);

// ---------------------------------------------------------------- BT / ANPR

struct AssociationScore {
  MacAddress mac;
  std::string plate;
  std::size_t co_occurrences = 0;
  std::size_t distinct_sensors = 0;
  double score = 0.0;
  friend bool operator==(const AssociationScore&, const AssociationScore&) = default;
};

struct CorrelationParams {
  double max_time_gap_s = 60.0;
  double max_distance_m = 100.0;
};

// A Bluetooth detection co-occurs with a plate when some ANPR detection of
// that plate lies within max_time_gap_s and max_distance_m of it; each
// Bluetooth detection contributes at most one co-occurrence per plate (its
// nearest-in-time qualifying ANPR detection). distinct_sensors counts the
// Bluetooth sensor ids involved; score = co_occurrences * distinct_sensors.
// Ordered by score desc, co_occurrences desc, mac asc, plate asc.
//
// Throws Error(InvalidParameters) for negative or non-finite parameters.
std::vector<AssociationScore> correlate_bt_anpr(std::span<const BtDetection> bt,
                                                std::span<const AnprDetection> anpr,
                                                const CorrelationParams& params);

// ---------------------------------------------------------------- GPS

struct StopSegment {
  GeoPoint centroid;
  Timestamp start{};
  Timestamp end{};
  double dwell_s = 0.0;
  std::size_t first_index = 0;
  std::size_t last_index = 0;
  friend bool operator==(const StopSegment&, const StopSegment&) = default;
};

struct StopParams {
  double radius_m = 50.0;       // points within this distance of the anchor
  double min_dwell_s = 300.0;   // shortest reported stop
};

// Anchor-and-extend stay-point sweep: from anchor i, extend j while point j
// stays within radius_m of point i; a run lasting at least min_dwell_s is a
// stop (centroid = arithmetic mean) and the sweep resumes after it,
// otherwise the anchor advances by one.
//
// Throws Error(InvalidParameters) when a parameter is not positive or the
// track is empty.
std::vector<StopSegment> detect_stops(const GpsTrack& track, const StopParams& params = {});

// Points with from <= t <= to, order preserved; id and label carried over.
// Throws Error(InvalidParameters) when from > to.
GpsTrack timeline_slice(const GpsTrack& track, Timestamp from, Timestamp to);

}  // namespace fgis::analysis
