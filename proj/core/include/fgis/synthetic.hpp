#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fgis/geo.hpp"
#include "fgis/time.hpp"

// Seeded desk-scale datasets for demos, training and the analysis oracles.
// Output is byte-identical for identical specs.
namespace fgis::synth {

struct StopSpec {
  GeoPoint position;
  double dwell_s = 0.0;  // 0 makes the place a turning point
};

struct TrackProfile {
  Timestamp start_time{};
  GeoPoint start;
  std::vector<StopSpec> stops;  // visited in order after `start`
  std::optional<GeoPoint> end;
  double speed_mps = 15.0;
  double sample_interval_s = 10.0;
  double stop_jitter_m = 5.0;
};

struct PlantedPair {
  std::string mac;    // empty: generated
  std::string plate;  // empty: generated
  int n_sensors = 5;
};

struct SyntheticSpec {
  std::uint64_t seed = 1;
  GeoPoint center{52.0705, 4.3007};
  Timestamp start_time{};
  int n_cameras = 200;
  int n_scan_networks = 60;
  std::optional<TrackProfile> track_profile;
  std::optional<PlantedPair> planted_pair;
  double bt_p = 0.42;    // fraction of vehicles with a detectable Bluetooth device
  double anpr_p = 1.0;   // per-pass plate read probability
  int n_noise_vehicles = 500;
  int n_sensors = 8;
  double time_window_s = 6 * 3600.0;
};

// Reads the JSON spec format (see README). Missing members take the
// defaults above; the track profile defaults to one 400 s stop between two
// moves. Throws Error(InvalidParameters) naming the offending member.
SyntheticSpec parse_spec(std::string_view json_text);
SyntheticSpec default_spec(std::uint64_t seed);

// File name -> contents: cameras.csv, scan_a.csv, scan_b.csv, bt.csv,
// anpr.csv, track.gpx (when a track profile is set) and truth.json.
using Dataset = std::map<std::string, std::string>;

Dataset generate(const SyntheticSpec& spec);

// Creates out_dir if needed. Throws Error(IoError).
void write_dataset(const Dataset& data, const std::filesystem::path& out_dir);

}  // namespace fgis::synth
