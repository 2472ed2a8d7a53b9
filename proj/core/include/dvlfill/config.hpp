// Run configuration: one JSON document, every seed derived from a master seed
// unless given explicitly.
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dvlfill/dataset.hpp"
#include "dvlfill/error_model.hpp"
#include "dvlfill/geometry.hpp"
#include "dvlfill/network.hpp"
#include "dvlfill/training.hpp"
#include "dvlfill/trajectory.hpp"

namespace dvlfill {

struct SimulationConfig {
  double duration_s = 3600.0;
  double test_duration_s = 600.0;  ///< separate held-out run; 0 disables
  TrajectoryProfile profile;
  std::uint64_t seed = 0;
  std::uint64_t test_seed = 0;
};

struct DataPaths {
  std::string imu_csv;
  std::string dvl_csv;
  std::string truth_csv;           ///< optional
  bool apply_error_model = false;  ///< DVL file holds clean beams to be corrupted

  bool empty() const { return imu_csv.empty() && dvl_csv.empty(); }
};

struct RunConfig {
  std::uint64_t seed = 1;
  double pitch_deg = kDefaultPitchDeg;
  std::array<double, kNumBeams> headings_rad = default_headings();
  DvlErrorParams error_model;
  std::vector<int> missing_beams = {2, 4};
  SimulationConfig simulation;
  DataPaths dataset;
  std::optional<DataPaths> test_dataset;
  AssembleOptions assemble;
  double train_frac = 0.8;
  nn::NetworkConfig network;
  std::uint64_t network_seed = 0;
  TrainConfig training;
  std::string out_dir = "out";

  BeamGeometry geometry() const { return BeamGeometry(pitch_deg, headings_rad); }
  BeamMask available_mask() const { return BeamMask::with_missing(missing_beams); }

  /// Re-derives every component seed from `master`.
  void apply_seed(std::uint64_t master);
  /// Throws ConfigError on inconsistent values.
  void validate() const;

  std::string to_json() const;
  /// FNV-1a over the canonical JSON form, 16 hex digits.
  std::string hash() const;

  static RunConfig from_json(std::string_view text);
  static RunConfig load(const std::filesystem::path& path);
};

}  // namespace dvlfill
