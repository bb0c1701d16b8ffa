#include "fgis/tile_archive.hpp"

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <list>
#include <map>
#include <mutex>
#include <sstream>

#include "fgis/error.hpp"

namespace fgis::tiles {
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr std::string_view kPngSignature = "\x89PNG\r\n\x1a\n";

[[noreturn]] void corrupt(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::CorruptManifest, "manifest field '" + field + "': " + why);
}

int zoom_field(const json& doc, const char* field) {
  const auto it = doc.find(field);
  if (it == doc.end()) corrupt(field, "missing");
  if (!it->is_number_integer()) corrupt(field, "must be an integer");
  const auto v = it->get<long long>();
  if (v < 0 || v > kMaxZoom) corrupt(field, "must be within [0, 30]");
  return static_cast<int>(v);
}

std::string string_field(const json& doc, const char* field) {
  const auto it = doc.find(field);
  if (it == doc.end()) corrupt(field, "missing");
  if (!it->is_string()) corrupt(field, "must be a string");
  return it->get<std::string>();
}

double coordinate(const json& corner, const char* field, const char* axis) {
  const auto it = corner.find(axis);
  if (it == corner.end() || !it->is_number()) {
    corrupt(std::string("bounds.") + field + "." + axis, "missing or not a number");
  }
  return it->get<double>();
}

std::optional<std::string> read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

std::optional<std::int64_t> parse_index(const std::string& s) {
  if (s.empty() || s.size() > 10) return std::nullopt;
  std::int64_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + (c - '0');
  }
  return v;
}

class LruCache {
 public:
  explicit LruCache(std::size_t capacity) : capacity_(capacity) {}

  TileBytes find(const TileCoord& key) {
    std::lock_guard lock(mu_);
    auto it = index_.find(key);
    if (it == index_.end()) {
      ++misses_;
      return nullptr;
    }
    ++hits_;
    order_.splice(order_.begin(), order_, it->second);
    return it->second->second;
  }

  void put(const TileCoord& key, TileBytes bytes) {
    if (capacity_ == 0) return;
    std::lock_guard lock(mu_);
    if (auto it = index_.find(key); it != index_.end()) {
      it->second->second = std::move(bytes);
      order_.splice(order_.begin(), order_, it->second);
      return;
    }
    order_.emplace_front(key, std::move(bytes));
    index_[key] = order_.begin();
    while (order_.size() > capacity_) {
      index_.erase(order_.back().first);
      order_.pop_back();
    }
  }

  CacheStats stats() const {
    std::lock_guard lock(mu_);
    return CacheStats{capacity_, order_.size(), hits_, misses_};
  }

 private:
  using Entry = std::pair<TileCoord, TileBytes>;
  std::size_t capacity_;
  mutable std::mutex mu_;
  std::list<Entry> order_;
  std::map<TileCoord, std::list<Entry>::iterator> index_;
  std::uint64_t hits_ = 0;
  std::uint64_t misses_ = 0;
};

}  // namespace

std::string_view kind_name(Violation::Kind k) noexcept {
  switch (k) {
    case Violation::Kind::OutsideEnvelope: return "outside-envelope";
    case Violation::Kind::NotPng: return "not-png";
    case Violation::Kind::StrayFile: return "stray-file";
    case Violation::Kind::CountMismatch: return "count-mismatch";
  }
  return "unknown";
}

TileManifest parse_manifest(std::string_view text) {
  const json doc = json::parse(text.begin(), text.end(), nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw Error(ErrorCode::CorruptManifest, "manifest.json is not a JSON object");
  }
  TileManifest m;
  m.name = string_field(doc, "name");
  m.attribution = string_field(doc, "attribution");
  m.min_zoom = zoom_field(doc, "min_zoom");
  m.max_zoom = zoom_field(doc, "max_zoom");
  if (m.min_zoom > m.max_zoom) corrupt("min_zoom", "greater than max_zoom");

  m.tile_format = string_field(doc, "tile_format");
  if (m.tile_format != "png") corrupt("tile_format", "only \"png\" is supported");

  const auto count = doc.find("tile_count");
  if (count == doc.end()) corrupt("tile_count", "missing");
  if (!count->is_number_unsigned()) corrupt("tile_count", "must be a non-negative integer");
  m.tile_count = count->get<std::uint64_t>();

  const auto bounds = doc.find("bounds");
  if (bounds == doc.end() || !bounds->is_object()) corrupt("bounds", "missing or not an object");
  const auto sw = bounds->find("sw");
  const auto ne = bounds->find("ne");
  if (sw == bounds->end() || !sw->is_object()) corrupt("bounds.sw", "missing or not an object");
  if (ne == bounds->end() || !ne->is_object()) corrupt("bounds.ne", "missing or not an object");
  try {
    m.bounds = BoundingBox::from_edges(coordinate(*sw, "sw", "lat"), coordinate(*sw, "sw", "lon"),
                                       coordinate(*ne, "ne", "lat"), coordinate(*ne, "ne", "lon"));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::CorruptManifest) throw;
    corrupt("bounds", "sw must be south-west of ne and within [-90, 90] x [-180, 180]");
  }
  return m;
}

std::string serialize_manifest(const TileManifest& m) {
  nlohmann::ordered_json doc = {
      {"name", m.name},
      {"attribution", m.attribution},
      {"min_zoom", m.min_zoom},
      {"max_zoom", m.max_zoom},
      {"bounds",
       {{"sw", {{"lat", m.bounds.south()}, {"lon", m.bounds.west()}}},
        {"ne", {{"lat", m.bounds.north()}, {"lon", m.bounds.east()}}}}},
      {"tile_format", m.tile_format},
      {"tile_count", m.tile_count},
  };
  return doc.dump(2) + "\n";
}

struct TileArchive::Impl {
  fs::path root;
  TileManifest manifest;
  mutable LruCache cache;

  Impl(fs::path r, TileManifest m, std::size_t capacity)
      : root(std::move(r)), manifest(std::move(m)), cache(capacity) {}

  fs::path tile_path(const TileCoord& t) const {
    return root / std::to_string(t.z) / std::to_string(t.x) / (std::to_string(t.y) + ".png");
  }
};

TileArchive::TileArchive(std::unique_ptr<Impl> impl) : impl_(std::move(impl)) {}
TileArchive::TileArchive(TileArchive&&) noexcept = default;
TileArchive& TileArchive::operator=(TileArchive&&) noexcept = default;
TileArchive::~TileArchive() = default;

TileArchive TileArchive::open(const fs::path& root, std::size_t cache_capacity) {
  const fs::path manifest_path = root / "manifest.json";
  std::error_code ec;
  if (!fs::is_regular_file(manifest_path, ec)) {
    throw Error(ErrorCode::MissingManifest, "tile archive has no manifest.json");
  }
  const auto text = read_file(manifest_path);
  if (!text) throw Error(ErrorCode::MissingManifest, "manifest.json is unreadable");
  return TileArchive(std::make_unique<Impl>(root, parse_manifest(*text), cache_capacity));
}

const TileManifest& TileArchive::manifest() const noexcept { return impl_->manifest; }
const fs::path& TileArchive::root() const noexcept { return impl_->root; }

TileBytes TileArchive::get_tile(const TileCoord& t) const {
  const auto& m = impl_->manifest;
  if (t.z < m.min_zoom || t.z > m.max_zoom) {
    throw Error(ErrorCode::ZoomOutOfRange, "zoom " + std::to_string(t.z) + " outside [" +
                                               std::to_string(m.min_zoom) + ", " +
                                               std::to_string(m.max_zoom) + "]");
  }
  if (!t.valid()) throw Error(ErrorCode::InvalidTileCoord, "tile " + t.to_string() + " does not exist");

  if (auto hit = impl_->cache.find(t)) return hit;
  auto bytes = read_file(impl_->tile_path(t));
  if (!bytes) return nullptr;
  auto shared = std::make_shared<const std::string>(std::move(*bytes));
  impl_->cache.put(t, shared);
  return shared;
}

CacheStats TileArchive::cache_stats() const { return impl_->cache.stats(); }

VerifyReport TileArchive::verify() const {
  const auto& m = impl_->manifest;
  VerifyReport report;
  std::error_code ec;
  for (fs::recursive_directory_iterator it(impl_->root, ec), end; !ec && it != end; it.increment(ec)) {
    if (!it->is_regular_file()) continue;
    const fs::path rel = fs::relative(it->path(), impl_->root);
    const std::string rel_s = rel.generic_string();
    if (rel_s == "manifest.json") continue;

    std::vector<std::string> parts;
    for (const auto& p : rel) parts.push_back(p.string());
    const bool png_name = rel.extension() == ".png";
    std::optional<TileCoord> coord;
    if (parts.size() == 3 && png_name) {
      const auto z = parse_index(parts[0]);
      const auto x = parse_index(parts[1]);
      const auto y = parse_index(rel.stem().string());
      if (z && x && y && *z <= kMaxZoom) coord = TileCoord{static_cast<int>(*z), *x, *y};
    }
    if (!png_name) {
      report.violations.push_back({Violation::Kind::NotPng, rel_s, "file is not a .png tile"});
      continue;
    }
    if (!coord || !coord->valid()) {
      report.violations.push_back(
          {Violation::Kind::StrayFile, rel_s, "path is not a valid {z}/{x}/{y}.png tile address"});
      continue;
    }
    if (coord->z < m.min_zoom || coord->z > m.max_zoom) {
      report.violations.push_back({Violation::Kind::OutsideEnvelope, rel_s,
                                   "zoom " + std::to_string(coord->z) + " outside [" +
                                       std::to_string(m.min_zoom) + ", " + std::to_string(m.max_zoom) + "]"});
      continue;
    }
    if (!tile_to_bbox(*coord).intersects(m.bounds)) {
      report.violations.push_back(
          {Violation::Kind::OutsideEnvelope, rel_s, "tile lies outside the manifest bounds"});
      continue;
    }
    const auto bytes = read_file(it->path());
    if (!bytes || bytes->compare(0, kPngSignature.size(), kPngSignature) != 0) {
      report.violations.push_back({Violation::Kind::NotPng, rel_s, "missing PNG signature"});
      continue;
    }
    ++report.tiles_found;
  }
  std::sort(report.violations.begin(), report.violations.end(),
            [](const Violation& a, const Violation& b) { return a.path < b.path; });
  if (report.tiles_found != m.tile_count) {
    report.violations.push_back({Violation::Kind::CountMismatch, "",
                                 "manifest tile_count " + std::to_string(m.tile_count) + ", found " +
                                     std::to_string(report.tiles_found)});
  }
  return report;
}

}  // namespace fgis::tiles
