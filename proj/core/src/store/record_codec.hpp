#pragma once

#include <json.hpp>

#include "fgis/analysis.hpp"
#include "fgis/records.hpp"
#include "fgis/evidence_store.hpp"

// JSON shapes shared by the on-disk store and the HTTP API. Positions are
// {"lat", "lon"} objects under the domain field name; times are ISO-8601 UTC
// strings.
namespace fgis::codec {

using json = nlohmann::json;

json to_json(const GeoPoint& p);
json to_json(const CameraRecord& c);
json to_json(const WifiObservation& o);
json to_json(const TrackPoint& p);
json to_json(const BtDetection& d);
json to_json(const AnprDetection& d);
json to_json(const store::CaseRecord& c);

// Decoders throw Error(CorruptStore) on shape errors; the store is the only
// reader of these documents.
GeoPoint point_from_json(const json& j);
CameraRecord camera_from_json(const json& j);
WifiObservation observation_from_json(const json& j);
TrackPoint track_point_from_json(const json& j);
BtDetection bt_from_json(const json& j);
AnprDetection anpr_from_json(const json& j);

Timestamp time_from_json(const json& j, const char* field);

}  // namespace fgis::codec
