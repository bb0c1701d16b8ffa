#include <doctest.h>
#include <set>

#include <thread>

#include "fgis/error.hpp"
#include "fgis/ingest.hpp"
#include "fgis/tile_archive.hpp"
#include "test_support.hpp"

using namespace fgis;
using namespace fgis::tiles;
using fgis::test::fixture;
using fgis::test::Gen;
using fgis::test::slurp;
using fgis::test::spit;
using fgis::test::TempDir;
namespace fs = std::filesystem;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an fgis::Error");
  return ErrorCode::NotFound;
}

std::string error_text(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

void copy_fixture(const fs::path& to) {
  fs::copy(fixture("tiles"), to, fs::copy_options::recursive | fs::copy_options::overwrite_existing);
}

}  // namespace

TEST_CASE("open the fixture archive") {
  const auto a = TileArchive::open(fixture("tiles"));
  CHECK(a.manifest().tile_count == 3);
  CHECK(a.manifest().min_zoom == 0);
  CHECK(a.manifest().max_zoom == 2);
  CHECK(a.manifest().name == "fixture world");
  CHECK(a.verify().clean());
  CHECK(a.verify().tiles_found == 3);
}

TEST_CASE("manifest validation") {
  const std::string good = slurp(fixture("tiles/manifest.json"));
  const auto m = parse_manifest(good);
  CHECK(parse_manifest(serialize_manifest(m)) == m);

  auto j = [&](const std::string& from, const std::string& to) {
    std::string s = good;
    const auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    s.replace(pos, from.size(), to);
    return s;
  };
  const auto inverted = j("\"min_zoom\": 0", "\"min_zoom\": 5");
  CHECK(code_of([&] { parse_manifest(inverted); }) == ErrorCode::CorruptManifest);
  CHECK(error_text([&] { parse_manifest(inverted); }).find("min_zoom") != std::string::npos);
  CHECK(code_of([&] { parse_manifest(j("\"png\"", "\"jpg\"")); }) == ErrorCode::CorruptManifest);
  CHECK(code_of([&] { parse_manifest(j("\"tile_count\": 3", "\"tile_count\": -1")); }) == ErrorCode::CorruptManifest);
  CHECK(code_of([] { parse_manifest("[]"); }) == ErrorCode::CorruptManifest);

  TempDir dir;
  CHECK(code_of([&] { TileArchive::open(dir.path()); }) == ErrorCode::MissingManifest);
  spit(dir / "manifest.json", inverted);
  CHECK(code_of([&] { TileArchive::open(dir.path()); }) == ErrorCode::CorruptManifest);
}

TEST_CASE("get_tile serves stored bytes verbatim") {
  const auto a = TileArchive::open(fixture("tiles"));
  for (const auto& rel : {"0/0/0.png", "1/1/1.png", "2/2/1.png"}) {
    const std::string path = rel;
    const int z = path[0] - '0';
    const int x = path[2] - '0';
    const int y = path[4] - '0';
    const auto bytes = a.get_tile({z, x, y});
    REQUIRE(bytes);
    CHECK(*bytes == slurp(fixture("tiles/" + path)));
  }
  // Hashes frozen from sha256sum over the fixture files.
  CHECK(ingest::sha256_hex(*a.get_tile({1, 1, 1})) == "0ef183d7c3a65681e3879801d85ec0cca3f22a0f0e5c6967a1d2b52e38d9da13");
  CHECK(a.get_tile({2, 0, 0}) == nullptr);
  CHECK(code_of([&] { a.get_tile({3, 0, 0}); }) == ErrorCode::ZoomOutOfRange);
  CHECK(code_of([&] { a.get_tile({2, 4, 0}); }) == ErrorCode::InvalidTileCoord);
}

TEST_CASE("cache transparency and bound") {
  const auto cached = TileArchive::open(fixture("tiles"), 2);
  const auto uncached = TileArchive::open(fixture("tiles"), 0);
  Gen g(51);
  for (int i = 0; i < 2000; ++i) {
    const int z = static_cast<int>(g.integer(0, 2));
    const TileCoord t{z, g.integer(0, (1 << z) - 1), g.integer(0, (1 << z) - 1)};
    const auto a = cached.get_tile(t);
    const auto b = uncached.get_tile(t);
    CHECK((a == nullptr) == (b == nullptr));
    if (a && b) CHECK(*a == *b);
    CHECK(cached.cache_stats().resident <= 2);
  }
  CHECK(cached.cache_stats().hits > 0);
  CHECK(uncached.cache_stats().resident == 0);
}

TEST_CASE("concurrent reads") {
  const auto a = TileArchive::open(fixture("tiles"), 1);
  const auto expected = slurp(fixture("tiles/2/2/1.png"));
  std::vector<std::thread> threads;
  std::atomic<int> mismatches{0};
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 500; ++i) {
        const auto b = a.get_tile((i + t) % 2 ? TileCoord{2, 2, 1} : TileCoord{0, 0, 0});
        if (!b || ((i + t) % 2 && *b != expected)) ++mismatches;
      }
    });
  }
  for (auto& th : threads) th.join();
  CHECK(mismatches == 0);
  CHECK(a.cache_stats().resident <= 1);
}

TEST_CASE("verify reports violations") {
  SUBCASE("stray tile above max_zoom") {
    TempDir dir;
    TileManifest m = parse_manifest(slurp(fixture("tiles/manifest.json")));
    m.max_zoom = 8;
    spit(dir / "manifest.json", serialize_manifest(m));
    spit(dir / "0/0/0.png", slurp(fixture("tiles/0/0/0.png")));
    spit(dir / "1/1/1.png", slurp(fixture("tiles/1/1/1.png")));
    spit(dir / "2/2/1.png", slurp(fixture("tiles/2/2/1.png")));
    spit(dir / "9/3/3.png", slurp(fixture("tiles/0/0/0.png")));
    const auto r = TileArchive::open(dir.path()).verify();
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].kind == Violation::Kind::OutsideEnvelope);
    CHECK(r.violations[0].path == "9/3/3.png");
  }
  SUBCASE("tile count off by one") {
    TempDir dir;
    copy_fixture(dir.path());
    TileManifest m = parse_manifest(slurp(fixture("tiles/manifest.json")));
    m.tile_count = 4;
    spit(dir / "manifest.json", serialize_manifest(m));
    const auto r = TileArchive::open(dir.path()).verify();
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].kind == Violation::Kind::CountMismatch);
  }
  SUBCASE("non-PNG and stray files") {
    TempDir dir;
    copy_fixture(dir.path());
    spit(dir / "2/0/0.png", "not a png");
    spit(dir / "misc/a.png", slurp(fixture("tiles/0/0/0.png")));
    const auto r = TileArchive::open(dir.path()).verify();
    std::set<Violation::Kind> kinds;
    for (const auto& v : r.violations) kinds.insert(v.kind);
    CHECK(kinds.count(Violation::Kind::NotPng) == 1);
    CHECK(kinds.count(Violation::Kind::StrayFile) == 1);
  }
  SUBCASE("tile outside bounds") {
    TempDir dir;
    copy_fixture(dir.path());
    TileManifest m = parse_manifest(slurp(fixture("tiles/manifest.json")));
    m.bounds = BoundingBox({50, -170}, {60, -160});
    spit(dir / "manifest.json", serialize_manifest(m));
    const auto r = TileArchive::open(dir.path()).verify();
    REQUIRE(r.violations.size() == 3);
    CHECK(r.violations[0].path == "1/1/1.png");
    CHECK(r.violations[1].path == "2/2/1.png");
    CHECK(r.violations[2].kind == Violation::Kind::CountMismatch);
  }
}
