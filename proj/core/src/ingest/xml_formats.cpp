// GPX, KML and GML readers on top of the expat element tree.

#include <array>
#include <functional>
#include <string>

#include "fgis/error.hpp"
#include "fgis/ingest.hpp"
#include "ingest/common.hpp"
#include "ingest/xml_tree.hpp"

namespace fgis::ingest {

using detail::checked_point;
using detail::parse_double;
using detail::trim;
using detail::XmlNode;

namespace {

std::string where(const XmlNode& n) {
  return "<" + n.name + "> at line " + std::to_string(n.line);
}

void require_root(const XmlNode& root, std::string_view expected, std::string_view format) {
  if (root.name != expected) {
    throw Error(ErrorCode::MalformedDocument, "not a " + std::string(format) + " document: root is <" +
                                                  root.name + ">, expected <" +
                                                  std::string(expected) + ">");
  }
}

// ---------------------------------------------------------------- GPX

struct GpxPoint {
  GeoPoint position;
  std::optional<Timestamp> time;
};

GpxPoint read_gpx_point(const XmlNode& n) {
  const std::string* lat_attr = n.attribute("lat");
  const std::string* lon_attr = n.attribute("lon");
  if (lat_attr == nullptr || lon_attr == nullptr) {
    throw Error(ErrorCode::MalformedDocument, where(n) + " lacks lat/lon attributes");
  }
  const auto lat = parse_double(*lat_attr);
  const auto lon = parse_double(*lon_attr);
  if (!lat || !lon) {
    throw Error(ErrorCode::InvalidCoordinate, where(n) + ": unparsable lat/lon");
  }
  GpxPoint p{checked_point(*lat, *lon, where(n)), std::nullopt};

  if (const XmlNode* t = n.child("time")) {
    const std::string text(trim(t->text));
    auto parsed = parse_iso8601_utc(text);
    if (!parsed) parsed = parse_iso8601_utc(text + "Z");
    if (!parsed) {
      throw Error(ErrorCode::MalformedDocument, where(*t) + ": invalid time '" + text + "'");
    }
    p.time = parsed;
  }
  return p;
}

void copy_simple_children(const XmlNode& n, std::initializer_list<std::string_view> names,
                          std::map<std::string, std::string>& props) {
  for (auto name : names) {
    if (const XmlNode* c = n.child(name)) {
      const auto text = trim(c->text);
      if (!text.empty()) props[std::string(name)] = std::string(text);
    }
  }
}

void emit_gpx_sequence(const std::vector<const XmlNode*>& nodes, std::map<std::string, std::string> props,
                       FeatureSet& fs) {
  if (nodes.empty()) return;
  std::vector<GpxPoint> pts;
  pts.reserve(nodes.size());
  for (const XmlNode* n : nodes) pts.push_back(read_gpx_point(*n));

  Feature f;
  f.timestamp = pts.front().time;
  if (pts.size() == 1) {
    props["degenerate_track"] = "true";
    f.geometry = pts.front().position;
  } else {
    LineString line;
    line.points.reserve(pts.size());
    bool any_time = false;
    std::string times;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      line.points.push_back(pts[i].position);
      if (i) times.push_back(',');
      if (pts[i].time) {
        times += format_iso8601(*pts[i].time);
        any_time = true;
      }
    }
    if (any_time) props["coord_times"] = std::move(times);
    f.geometry = std::move(line);
  }
  f.properties = std::move(props);
  fs.features.push_back(std::move(f));
}

// ---------------------------------------------------------------- KML

std::vector<GeoPoint> read_kml_coordinates(const XmlNode& coords) {
  std::vector<GeoPoint> out;
  for (auto tuple : detail::split_ws(coords.text)) {
    std::array<std::string_view, 3> parts{};
    std::size_t count = 0;
    std::size_t start = 0;
    while (start <= tuple.size()) {
      const auto comma = tuple.find(',', start);
      const auto end = comma == std::string_view::npos ? tuple.size() : comma;
      if (count == parts.size()) {
        throw Error(ErrorCode::MalformedDocument, where(coords) + ": tuple with more than 3 values");
      }
      parts[count++] = tuple.substr(start, end - start);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (count < 2) {
      throw Error(ErrorCode::MalformedDocument, where(coords) + ": expected lon,lat[,alt]");
    }
    const auto lon = parse_double(parts[0]);
    const auto lat = parse_double(parts[1]);
    if (!lon || !lat) {
      throw Error(ErrorCode::InvalidCoordinate, where(coords) + ": unparsable coordinate tuple");
    }
    out.push_back(checked_point(*lat, *lon, where(coords)));
  }
  return out;
}

bool is_kml_unsupported_geometry(std::string_view name) {
  return name == "Polygon" || name == "LinearRing" || name == "Model" || name == "Track" ||
         name == "MultiTrack";
}

void collect_kml_geometries(const XmlNode& n, std::vector<Geometry>& out, std::size_t& skipped) {
  for (const auto& c : n.children) {
    if (c->name == "Point") {
      const XmlNode* coords = c->child("coordinates");
      if (coords == nullptr) throw Error(ErrorCode::MalformedDocument, where(*c) + " has no <coordinates>");
      auto pts = read_kml_coordinates(*coords);
      if (pts.size() != 1) {
        throw Error(ErrorCode::MalformedDocument, where(*coords) + ": Point needs exactly one position");
      }
      out.emplace_back(pts.front());
    } else if (c->name == "LineString") {
      const XmlNode* coords = c->child("coordinates");
      if (coords == nullptr) throw Error(ErrorCode::MalformedDocument, where(*c) + " has no <coordinates>");
      auto pts = read_kml_coordinates(*coords);
      if (pts.size() < 2) {
        throw Error(ErrorCode::MalformedDocument, where(*coords) + ": LineString needs at least 2 positions");
      }
      out.emplace_back(LineString{std::move(pts)});
    } else if (c->name == "MultiGeometry") {
      collect_kml_geometries(*c, out, skipped);
    } else if (is_kml_unsupported_geometry(c->name)) {
      ++skipped;
    }
  }
}

void read_placemark(const XmlNode& pm, FeatureSet& fs) {
  std::map<std::string, std::string> props;
  copy_simple_children(pm, {"name", "description"}, props);
  std::optional<Timestamp> when;
  if (const XmlNode* ts = pm.child("TimeStamp")) {
    const std::string text = ts->child_text("when");
    if (!text.empty()) {
      props["when"] = text;
      when = parse_iso8601_utc(text);
    }
  }
  if (const XmlNode* ext = pm.child("ExtendedData")) {
    for (const XmlNode* d : ext->children_named("Data")) {
      if (const std::string* key = d->attribute("name")) props[*key] = d->child_text("value");
    }
    for (const XmlNode* schema : ext->children_named("SchemaData")) {
      for (const XmlNode* sd : schema->children_named("SimpleData")) {
        if (const std::string* key = sd->attribute("name")) props[*key] = std::string(trim(sd->text));
      }
    }
  }

  std::vector<Geometry> geoms;
  collect_kml_geometries(pm, geoms, fs.provenance.skipped_count);
  for (std::size_t i = 0; i < geoms.size(); ++i) {
    Feature f{std::move(geoms[i]), props, when};
    if (geoms.size() > 1) f.properties["part"] = std::to_string(i);
    fs.features.push_back(std::move(f));
  }
}

void walk_kml(const XmlNode& n, FeatureSet& fs) {
  for (const auto& c : n.children) {
    if (c->name == "Placemark") {
      read_placemark(*c, fs);
    } else {
      walk_kml(*c, fs);
    }
  }
}

// ---------------------------------------------------------------- GML

bool is_lat_lon_4326(std::string_view srs) {
  static constexpr std::array<std::string_view, 4> kAccepted = {
      "EPSG:4326",
      "urn:ogc:def:crs:EPSG::4326",
      "urn:ogc:def:crs:EPSG:6.6:4326",
      "http://www.opengis.net/def/crs/EPSG/0/4326",
  };
  for (auto a : kAccepted) {
    if (srs == a) return true;
  }
  return false;
}

const std::string* inherited_attribute(const XmlNode& n, std::string_view name) {
  for (const XmlNode* cur = &n; cur != nullptr; cur = cur->parent) {
    if (const std::string* v = cur->attribute(name)) return v;
  }
  return nullptr;
}

void check_crs(const XmlNode& geom) {
  if (const std::string* srs = inherited_attribute(geom, "srsName")) {
    if (!is_lat_lon_4326(trim(*srs))) {
      throw Error(ErrorCode::UnsupportedCrs,
                  where(geom) + ": srsName '" + *srs + "' is not supported (EPSG:4326 only)");
    }
  }
}

std::size_t dimension_of(const XmlNode& n) {
  const std::string* dim = inherited_attribute(n, "srsDimension");
  if (dim == nullptr) return 2;
  const auto v = detail::parse_integer(*dim);
  if (!v || (*v != 2 && *v != 3)) {
    throw Error(ErrorCode::MalformedDocument, where(n) + ": srsDimension must be 2 or 3");
  }
  return static_cast<std::size_t>(*v);
}

std::vector<GeoPoint> read_pos_values(const XmlNode& n, std::size_t dim) {
  const auto tokens = detail::split_ws(n.text);
  if (tokens.empty() || tokens.size() % dim != 0) {
    throw Error(ErrorCode::MalformedDocument,
                where(n) + ": expected a multiple of " + std::to_string(dim) + " values");
  }
  std::vector<GeoPoint> out;
  for (std::size_t i = 0; i < tokens.size(); i += dim) {
    const auto lat = parse_double(tokens[i]);
    const auto lon = parse_double(tokens[i + 1]);
    if (!lat || !lon) throw Error(ErrorCode::InvalidCoordinate, where(n) + ": unparsable position");
    out.push_back(checked_point(*lat, *lon, where(n)));
  }
  return out;
}

std::map<std::string, std::string> gml_feature_properties(const XmlNode& geom) {
  std::map<std::string, std::string> props;
  const XmlNode* property = geom.parent;
  const XmlNode* feature = property ? property->parent : nullptr;
  if (feature == nullptr) return props;
  if (const std::string* id = feature->attribute("id")) props["gml_id"] = *id;
  for (const auto& c : feature->children) {
    if (!c->children.empty()) continue;
    const auto text = trim(c->text);
    if (!text.empty()) props[c->name] = std::string(text);
  }
  return props;
}

bool is_gml_skipped_geometry(std::string_view name) {
  return name == "Polygon" || name == "Surface" || name == "Curve" || name == "MultiPoint" ||
         name == "MultiCurve" || name == "MultiLineString" || name == "MultiSurface" ||
         name == "MultiPolygon" || name == "MultiGeometry" || name == "Solid" ||
         name == "CompositeCurve" || name == "CompositeSurface";
}

void visit_gml(const XmlNode& node, FeatureSet& fs) {
  if (node.name == "Point") {
    check_crs(node);
    const XmlNode* pos = node.child("pos");
    if (pos == nullptr) {
      throw Error(ErrorCode::MalformedDocument, where(node) + " has no <gml:pos>");
    }
    auto pts = read_pos_values(*pos, dimension_of(*pos));
    if (pts.size() != 1) {
      throw Error(ErrorCode::MalformedDocument, where(*pos) + ": Point needs exactly one position");
    }
    fs.features.push_back(Feature{pts.front(), gml_feature_properties(node), std::nullopt});
  } else if (node.name == "LineString") {
    check_crs(node);
    std::vector<GeoPoint> pts;
    if (const XmlNode* list = node.child("posList")) {
      pts = read_pos_values(*list, dimension_of(*list));
    } else {
      for (const XmlNode* pos : node.children_named("pos")) {
        auto one = read_pos_values(*pos, dimension_of(*pos));
        pts.insert(pts.end(), one.begin(), one.end());
      }
    }
    if (pts.size() < 2) {
      throw Error(ErrorCode::MalformedDocument, where(node) + ": LineString needs at least 2 positions");
    }
    fs.features.push_back(
        Feature{LineString{std::move(pts)}, gml_feature_properties(node), std::nullopt});
  } else if (is_gml_skipped_geometry(node.name)) {
    ++fs.provenance.skipped_count;
  } else if (node.name != "boundedBy" && node.name != "Envelope") {
    for (const auto& c : node.children) visit_gml(*c, fs);
  }
}

}  // namespace

FeatureSet parse_gpx(std::string_view bytes, const ImportContext& ctx) {
  const auto root = detail::parse_xml(bytes);
  require_root(*root, "gpx", "GPX");
  FeatureSet fs;
  fs.provenance = detail::make_provenance(ctx, SourceFormat::Gpx, bytes);

  for (const auto& c : root->children) {
    const XmlNode& node = *c;
    if (node.name == "wpt") {
      const GpxPoint p = read_gpx_point(node);
      Feature f{p.position, {}, p.time};
      copy_simple_children(node, {"name", "desc", "cmt", "sym", "type", "ele"}, f.properties);
      f.properties["kind"] = "waypoint";
      fs.features.push_back(std::move(f));
    } else if (node.name == "rte") {
      std::map<std::string, std::string> props;
      copy_simple_children(node, {"name", "desc"}, props);
      props["kind"] = "route";
      emit_gpx_sequence(node.children_named("rtept"), std::move(props), fs);
    } else if (node.name == "trk") {
      const auto segments = node.children_named("trkseg");
      for (std::size_t s = 0; s < segments.size(); ++s) {
        std::map<std::string, std::string> props;
        copy_simple_children(node, {"name", "desc"}, props);
        props["kind"] = "track";
        props["segment"] = std::to_string(s);
        emit_gpx_sequence(segments[s]->children_named("trkpt"), std::move(props), fs);
      }
    }
  }
  return fs;
}

FeatureSet parse_kml(std::string_view bytes, const ImportContext& ctx) {
  const auto root = detail::parse_xml(bytes);
  require_root(*root, "kml", "KML");
  FeatureSet fs;
  fs.provenance = detail::make_provenance(ctx, SourceFormat::Kml, bytes);
  walk_kml(*root, fs);
  return fs;
}

FeatureSet parse_gml(std::string_view bytes, const ImportContext& ctx) {
  const auto root = detail::parse_xml(bytes);
  FeatureSet fs;
  fs.provenance = detail::make_provenance(ctx, SourceFormat::Gml, bytes);
  visit_gml(*root, fs);
  return fs;
}

}  // namespace fgis::ingest
