#include <benchmark/benchmark.h>

#include <filesystem>
#include <random>

#include "fgis/analysis.hpp"
#include "fgis/evidence_store.hpp"
#include "fgis/geo.hpp"
#include "fgis/grid_index.hpp"
#include "fgis/ingest.hpp"
#include "fgis/synthetic.hpp"
#include "fgis/tile_archive.hpp"
#include "fgis/tile_math.hpp"

using namespace fgis;

namespace {

std::vector<GeoPoint> city_points(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lat(51.97, 52.17), lon(4.15, 4.45);
  std::vector<GeoPoint> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(lat(rng), lon(rng));
  return out;
}

void BM_Haversine(benchmark::State& state) {
  const auto pts = city_points(1024, 1);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(haversine_distance(pts[i & 1023], pts[(i + 1) & 1023]));
    ++i;
  }
}
BENCHMARK(BM_Haversine);

void BM_PointToTile(benchmark::State& state) {
  const auto pts = city_points(1024, 2);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(point_to_tile(pts[i++ & 1023], 16));
}
BENCHMARK(BM_PointToTile);

void BM_RadiusGrid(benchmark::State& state) {
  const auto pts = city_points(static_cast<std::size_t>(state.range(0)), 3);
  GridIndex grid;
  for (std::size_t i = 0; i < pts.size(); ++i) grid.insert(i, pts[i]);
  const auto centers = city_points(64, 4);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(grid.query_radius(centers[i++ & 63], 500.0));
}
BENCHMARK(BM_RadiusGrid)->Arg(10000)->Arg(100000);

void BM_RadiusBruteForce(benchmark::State& state) {
  const auto pts = city_points(static_cast<std::size_t>(state.range(0)), 3);
  const auto centers = city_points(64, 4);
  std::size_t i = 0;
  for (auto _ : state) {
    std::vector<std::size_t> hits;
    const auto& c = centers[i++ & 63];
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (haversine_distance(pts[k], c) <= 500.0) hits.push_back(k);
    }
    benchmark::DoNotOptimize(hits);
  }
}
BENCHMARK(BM_RadiusBruteForce)->Arg(10000)->Arg(100000);

void BM_CameraQuery(benchmark::State& state) {
  const auto pts = city_points(10000, 5);
  std::vector<CameraRecord> cams;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CameraRecord c;
    c.camera_id = "cam-" + std::to_string(i);
    c.position = pts[i];
    c.category = static_cast<CameraCategory>(i % 3);
    cams.push_back(std::move(c));
  }
  const store::CameraRegistry reg(std::move(cams));
  const auto centers = city_points(64, 6);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(reg.query(centers[i++ & 63], 1000.0, {CameraCategory::Private}));
}
BENCHMARK(BM_CameraQuery);

const synth::Dataset& dataset() {
  static const synth::Dataset d = synth::generate(synth::default_spec(7));
  return d;
}

void BM_ParseGpx(benchmark::State& state) {
  const auto& gpx = dataset().at("track.gpx");
  for (auto _ : state) benchmark::DoNotOptimize(ingest::parse_gpx(gpx));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * gpx.size()));
}
BENCHMARK(BM_ParseGpx);

void BM_ParseBtCsv(benchmark::State& state) {
  const auto& csv = dataset().at("bt.csv");
  for (auto _ : state) benchmark::DoNotOptimize(ingest::parse_bt_csv(csv));
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * csv.size()));
}
BENCHMARK(BM_ParseBtCsv);

void BM_Correlate(benchmark::State& state) {
  const auto bt = ingest::parse_bt_csv(dataset().at("bt.csv")).value;
  const auto anpr = ingest::parse_anpr_csv(dataset().at("anpr.csv")).value;
  for (auto _ : state) benchmark::DoNotOptimize(analysis::correlate_bt_anpr(bt, anpr, {}));
  state.counters["bt"] = static_cast<double>(bt.size());
  state.counters["anpr"] = static_cast<double>(anpr.size());
}
BENCHMARK(BM_Correlate)->Unit(benchmark::kMillisecond);

void BM_DetectStops(benchmark::State& state) {
  const auto track = ingest::tracks_from_features(ingest::parse_gpx(dataset().at("track.gpx"))).tracks.at(0);
  for (auto _ : state) benchmark::DoNotOptimize(analysis::detect_stops(track));
  state.counters["points"] = static_cast<double>(track.points.size());
}
BENCHMARK(BM_DetectStops);

void BM_TileCache(benchmark::State& state) {
  const std::filesystem::path root = FGIS_BENCH_TILES;
  const auto archive = tiles::TileArchive::open(root, static_cast<std::size_t>(state.range(0)));
  const TileCoord tile{1, 1, 1};
  for (auto _ : state) benchmark::DoNotOptimize(archive.get_tile(tile));
}
BENCHMARK(BM_TileCache)->Arg(0)->Arg(64);

}  // namespace
BENCHMARK_MAIN();
