#pragma once

#include <json.hpp>

#include "fgis/analysis.hpp"
#include "fgis/evidence_store.hpp"
#include "fgis/ingest.hpp"
#include "store/record_codec.hpp"

// Response bodies for the analysis and store types. Field names follow the
// domain types.
namespace fgis::api::codec {

using fgis::codec::json;
using fgis::codec::to_json;

json to_json(const Provenance& p);
json to_json(const store::LayerInfo& l);
json to_json(const store::CameraHit& h);
json to_json(const WifiScan& s, bool with_observations);
json to_json(const GpsTrack& t);
json to_json(const analysis::ScanDiff& d);
json to_json(const analysis::ObservationHit& h);
json to_json(const analysis::PresenceEvidence& e);
json to_json(const analysis::AssociationScore& s);
json to_json(const analysis::StopSegment& s);
json to_json(const std::vector<ingest::RowIssue>& issues);

}  // namespace fgis::api::codec
