#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fgis/feature.hpp"
#include "fgis/records.hpp"

namespace fgis::ingest {

// Where imported bytes came from. import_time defaults to "now" when unset.
struct ImportContext {
  std::string source_name = "unnamed";
  std::optional<Timestamp> import_time;
};

// --- geodata formats -------------------------------------------------------
//
// All XML/JSON parsers throw Error(MalformedDocument) for unparsable input
// (XML errors carry the line number) and Error(InvalidCoordinate) for
// coordinates outside [-90, 90] x [-180, 180], naming the element.

// <wpt> -> Point; each <trkseg> and <rte> -> LineString with per-point times
// in the "coord_times" property. A one-point segment becomes a Point with
// "degenerate_track" = "true". Times without a zone are read as UTC, which is
// what the GPX schema prescribes.
FeatureSet parse_gpx(std::string_view bytes, const ImportContext& ctx = {});

// Placemark Point/LineString (coordinates "lon,lat[,alt]"), MultiGeometry
// members flattened; other geometries counted in provenance.skipped_count.
FeatureSet parse_kml(std::string_view bytes, const ImportContext& ctx = {});

// gml:Point/gml:pos and gml:LineString/gml:posList in EPSG:4326 "lat lon"
// order. Any other srsName throws Error(UnsupportedCrs).
FeatureSet parse_gml(std::string_view bytes, const ImportContext& ctx = {});

// RFC 7946 FeatureCollection. Geometries other than Point/LineString are
// skipped and counted in provenance.skipped_count.
FeatureSet parse_geojson(std::string_view bytes, const ImportContext& ctx = {});

// Reads a document written by export_geojson and restores the embedded
// provenance and feature timestamps verbatim (the evidence store's layer
// files).
FeatureSet read_layer_document(std::string_view bytes);

struct GeoJsonOptions {
  // Decimal places for coordinates; nullopt keeps full double precision.
  std::optional<int> coordinate_decimals = 7;
};

// FeatureCollection with coordinates [lon, lat], properties, a per-feature
// "timestamp" member and a collection-level "provenance" member.
std::string export_geojson(const FeatureSet& fs, const GeoJsonOptions& options = {});

struct TrackExtraction {
  std::vector<GpsTrack> tracks;  // ids left empty for the store to assign
  std::size_t skipped = 0;       // track features lacking usable times
};

// GpsTracks from the track features of a parsed GPX layer. A segment
// qualifies when every point carries a time and times never decrease.
TrackExtraction tracks_from_features(const FeatureSet& fs);

// --- evidence CSV schemas --------------------------------------------------
//
// UTF-8, comma separated, RFC 4180 quoting, header row mandatory; column
// order is free and extra columns are ignored. Timestamps must carry a zone.
//
//   wifi:   timestamp,bssid,ssid,lat,lon,signal_dbm
//   anpr:   timestamp,plate,sensor_id,lat,lon
//   bt:     timestamp,mac,sensor_id,lat,lon
//   camera: camera_id,lat,lon,category,owner,description

struct CsvOptions {
  // Strict imports abort on the first file containing any bad row; lenient
  // imports keep the good rows and report the rest.
  bool lenient = false;
};

struct RowIssue {
  std::size_t row = 0;  // 1-based line number in the file, header = 1
  std::string reason;
  friend bool operator==(const RowIssue&, const RowIssue&) = default;
};

template <typename T>
struct CsvImport {
  T value;
  std::vector<RowIssue> skipped;
};

// Error(MissingHeader) when the header lacks a required column;
// Error(BadRow) listing every bad row when not lenient.
CsvImport<WifiScan> parse_wifi_csv(std::string_view bytes, const CsvOptions& options = {},
                                   const ImportContext& ctx = {});
CsvImport<std::vector<AnprDetection>> parse_anpr_csv(std::string_view bytes,
                                                     const CsvOptions& options = {});
CsvImport<std::vector<BtDetection>> parse_bt_csv(std::string_view bytes,
                                                 const CsvOptions& options = {});
CsvImport<std::vector<CameraRecord>> parse_camera_csv(std::string_view bytes,
                                                      const CsvOptions& options = {},
                                                      const ImportContext& ctx = {});

// Lowercase hex SHA-256 of the bytes; recorded in provenance at import.
std::string sha256_hex(std::string_view bytes);

}  // namespace fgis::ingest
