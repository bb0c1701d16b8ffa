#include <cmath>
#include <json.hpp>

#include "fgis/error.hpp"
#include "fgis/ingest.hpp"
#include "ingest/common.hpp"

namespace fgis::ingest {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

GeoPoint read_position(const json& pos, const std::string& where) {
  if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number()) {
    throw Error(ErrorCode::MalformedDocument, where + ": position must be [lon, lat(, alt)]");
  }
  const double lon = pos[0].get<double>();
  const double lat = pos[1].get<double>();
  return detail::checked_point(lat, lon, where);
}

std::string flatten_value(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return std::string();
  return v.dump();
}

// Returns false when the geometry type is one we skip.
bool read_geometry(const json& geom, const std::string& where, Geometry& out) {
  if (!geom.is_object()) return false;  // null geometry: unlocated feature
  const auto type_it = geom.find("type");
  if (type_it == geom.end() || !type_it->is_string()) {
    throw Error(ErrorCode::MalformedDocument, where + ": geometry without type");
  }
  const std::string type = type_it->get<std::string>();
  if (type != "Point" && type != "LineString") return false;

  const auto coords = geom.find("coordinates");
  if (coords == geom.end()) {
    throw Error(ErrorCode::MalformedDocument, where + ": geometry without coordinates");
  }
  if (type == "Point") {
    out = read_position(*coords, where);
    return true;
  }
  if (!coords->is_array() || coords->size() < 2) {
    throw Error(ErrorCode::MalformedDocument, where + ": LineString needs at least 2 positions");
  }
  LineString line;
  line.points.reserve(coords->size());
  for (const auto& pos : *coords) line.points.push_back(read_position(pos, where));
  out = std::move(line);
  return true;
}

FeatureSet read_collection(std::string_view bytes, bool keep_embedded_provenance,
                           const ImportContext& ctx) {
  json doc = json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorCode::MalformedDocument, "invalid JSON");
  if (!doc.is_object() || doc.value("type", std::string()) != "FeatureCollection") {
    throw Error(ErrorCode::MalformedDocument, "GeoJSON root must be a FeatureCollection");
  }
  const auto features = doc.find("features");
  if (features == doc.end() || !features->is_array()) {
    throw Error(ErrorCode::MalformedDocument, "FeatureCollection without a features array");
  }

  FeatureSet fs;
  fs.provenance = detail::make_provenance(ctx, SourceFormat::GeoJson, bytes);
  if (keep_embedded_provenance) {
    const auto prov = doc.find("provenance");
    if (prov == doc.end() || !prov->is_object()) {
      throw Error(ErrorCode::MalformedDocument, "layer document without provenance");
    }
    fs.provenance.source_name = prov->value("source_name", std::string());
    const auto fmt = parse_format_name(prov->value("source_format", std::string()));
    if (!fmt) throw Error(ErrorCode::MalformedDocument, "layer provenance has unknown source_format");
    fs.provenance.source_format = *fmt;
    const auto when = parse_iso8601_utc(prov->value("import_time", std::string()));
    if (!when) throw Error(ErrorCode::MalformedDocument, "layer provenance has invalid import_time");
    fs.provenance.import_time = *when;
    fs.provenance.content_sha256 = prov->value("content_sha256", std::string());
    fs.provenance.skipped_count = prov->value("skipped_count", std::size_t{0});
  }

  std::size_t index = 0;
  for (const auto& feat : *features) {
    const std::string where = "feature " + std::to_string(index++);
    if (!feat.is_object() || feat.value("type", std::string()) != "Feature") {
      throw Error(ErrorCode::MalformedDocument, where + ": not a Feature object");
    }
    Feature f;
    const auto geom = feat.find("geometry");
    if (geom == feat.end() || !read_geometry(*geom, where, f.geometry)) {
      if (!keep_embedded_provenance) ++fs.provenance.skipped_count;
      continue;
    }
    const auto props = feat.find("properties");
    if (props != feat.end() && props->is_object()) {
      for (const auto& [k, v] : props->items()) f.properties[k] = flatten_value(v);
    }
    const auto ts = feat.find("timestamp");
    if (ts != feat.end() && ts->is_string()) {
      f.timestamp = parse_iso8601_utc(ts->get<std::string>());
      if (!f.timestamp) throw Error(ErrorCode::MalformedDocument, where + ": invalid timestamp");
    }
    fs.features.push_back(std::move(f));
  }
  return fs;
}

double round_to(double v, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(v * scale) / scale;
}

}  // namespace

FeatureSet parse_geojson(std::string_view bytes, const ImportContext& ctx) {
  try {
    return read_collection(bytes, false, ctx);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedDocument, std::string("GeoJSON: ") + e.what());
  }
}

FeatureSet read_layer_document(std::string_view bytes) {
  try {
    return read_collection(bytes, true, ImportContext{});
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedDocument, std::string("layer document: ") + e.what());
  }
}

std::string export_geojson(const FeatureSet& fs, const GeoJsonOptions& options) {
  auto coord = [&](const GeoPoint& p) {
    if (!options.coordinate_decimals) return ordered_json::array({p.lon(), p.lat()});
    const int d = *options.coordinate_decimals;
    double lon = round_to(p.lon(), d);
    if (lon >= 180.0) lon -= 360.0;  // keep [-180, 180) after rounding up
    return ordered_json::array({lon, round_to(p.lat(), d)});
  };

  ordered_json features = ordered_json::array();
  for (const auto& f : fs.features) {
    ordered_json geometry;
    if (const auto* pt = std::get_if<GeoPoint>(&f.geometry)) {
      geometry = {{"type", "Point"}, {"coordinates", coord(*pt)}};
    } else {
      const auto& line = std::get<LineString>(f.geometry);
      ordered_json coords = ordered_json::array();
      for (const auto& p : line.points) coords.push_back(coord(p));
      geometry = {{"type", "LineString"}, {"coordinates", std::move(coords)}};
    }
    ordered_json props = ordered_json::object();
    for (const auto& [k, v] : f.properties) props[k] = v;

    ordered_json feature = {{"type", "Feature"}, {"geometry", std::move(geometry)},
                            {"properties", std::move(props)}};
    if (f.timestamp) feature["timestamp"] = format_iso8601(*f.timestamp);
    features.push_back(std::move(feature));
  }

  const auto& p = fs.provenance;
  ordered_json doc = {
      {"type", "FeatureCollection"},
      {"features", std::move(features)},
      {"provenance",
       {{"source_name", p.source_name},
        {"source_format", std::string(format_name(p.source_format))},
        {"import_time", format_iso8601(p.import_time)},
        {"content_sha256", p.content_sha256},
        {"skipped_count", p.skipped_count}}},
  };
  return doc.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

}  // namespace fgis::ingest
