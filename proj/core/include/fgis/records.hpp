#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fgis/geo.hpp"
#include "fgis/mac_address.hpp"
#include "fgis/time.hpp"

namespace fgis {

enum class CameraCategory { Public, Private, Unknown };

std::string_view category_name(CameraCategory c) noexcept;
// Case-insensitive; anything but "public"/"private" maps to nullopt.
std::optional<CameraCategory> parse_category(std::string_view text) noexcept;

struct CameraRecord {
  std::string camera_id;
  GeoPoint position;
  CameraCategory category = CameraCategory::Unknown;
  std::string owner_contact;
  std::string description;
  std::string source;
  std::vector<std::string> tags;

  friend bool operator==(const CameraRecord&, const CameraRecord&) = default;
};

struct WifiObservation {
  MacAddress bssid;
  std::optional<std::string> ssid;  // nullopt for hidden networks
  GeoPoint position;
  Timestamp timestamp{};
  std::optional<int> signal_dbm;

  friend bool operator==(const WifiObservation&, const WifiObservation&) = default;
};

struct WifiScan {
  std::string scan_id;
  std::string label;
  Timestamp captured_from{};
  Timestamp captured_to{};
  std::vector<WifiObservation> observations;

  // Sets captured_from/captured_to to the min/max observation time.
  void derive_capture_range();

  friend bool operator==(const WifiScan&, const WifiScan&) = default;
};

struct TrackPoint {
  GeoPoint position;
  Timestamp timestamp{};
  friend bool operator==(const TrackPoint&, const TrackPoint&) = default;
};

struct GpsTrack {
  std::string track_id;
  std::string label;
  std::vector<TrackPoint> points;  // timestamps non-decreasing

  bool timestamps_monotonic() const noexcept;
  friend bool operator==(const GpsTrack&, const GpsTrack&) = default;
};

struct BtDetection {
  MacAddress mac;
  std::string sensor_id;
  GeoPoint position;
  Timestamp timestamp{};
  friend bool operator==(const BtDetection&, const BtDetection&) = default;
};

struct AnprDetection {
  std::string plate;  // uppercase, no whitespace
  std::string sensor_id;
  GeoPoint position;
  Timestamp timestamp{};
  friend bool operator==(const AnprDetection&, const AnprDetection&) = default;
};

// Uppercases and strips all whitespace: " ab 12 cd" -> "AB12CD".
std::string normalize_plate(std::string_view text);

}  // namespace fgis
