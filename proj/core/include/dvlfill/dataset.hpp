// Aligned training tuples: one IMU window plus partial/target beams per DVL epoch.
#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "dvlfill/geometry.hpp"

namespace dvlfill {

struct ImuSample {
  double t = 0.0;
  Vec3 accel_mps2 = Vec3::Zero();
  Vec3 gyro_radps = Vec3::Zero();
};

struct DvlSample {
  double epoch_s = 0.0;
  Vec4 beams_mps = Vec4::Zero();
  BeamMask validity = BeamMask::all();
};

struct TruthSample {
  double t = 0.0;
  Vec3 v_mps = Vec3::Zero();
};

using ImuSeries = std::vector<ImuSample>;
using DvlSeries = std::vector<DvlSample>;
using TruthSeries = std::vector<TruthSample>;

using WindowMatrix = Eigen::Matrix<double, Eigen::Dynamic, 3>;

/// IMU samples in (epoch - window, epoch], oldest first.
struct ImuWindow {
  double epoch_s = 0.0;
  WindowMatrix accel_mps2;
  WindowMatrix gyro_radps;

  Eigen::Index length() const { return accel_mps2.rows(); }
};

struct TrainingTuple {
  ImuWindow window;
  Vec2 partial_beams_mps = Vec2::Zero();  ///< available beams, beam order
  Vec2 target_beams_mps = Vec2::Zero();   ///< missing beams, beam order
  Vec3 v_true_mps = Vec3::Zero();
  BeamMask mask;                          ///< available beams
};

struct GapReport {
  std::size_t imu_gaps = 0;       ///< window did not hold exactly window_len samples
  std::size_t invalid_beams = 0;  ///< a required beam was flagged invalid
  std::size_t missing_truth = 0;  ///< no truth sample at the epoch
  std::vector<double> skipped_epochs;

  std::size_t count() const { return imu_gaps + invalid_beams + missing_truth; }
};

struct AssembleOptions {
  std::size_t window_len = 100;
  double window_s = 1.0;
  double time_tolerance_s = 1e-6;
};

struct TupleSet {
  std::vector<TrainingTuple> tuples;
  GapReport gaps;
};

/// One tuple per DVL epoch whose preceding window is complete. `mask` gives
/// the available beams and must have exactly two set. `truth` is matched to
/// DVL epochs by timestamp. Skipped epochs are recorded in the gap report, so
/// tuples.size() + gaps.count() == dvl.size().
TupleSet assemble_tuples(const ImuSeries& imu, const DvlSeries& dvl, const TruthSeries& truth, BeamMask mask,
                         const AssembleOptions& options = {});

/// Ground truth from a full 4-beam least-squares solve of each DVL sample.
/// Samples with fewer than three valid beams are dropped.
TruthSeries truth_from_beams(const DvlSeries& dvl, const BeamGeometry& geometry);

/// Time-contiguous split: the first floor(n * train_frac) tuples train.
/// Throws DomainError unless 0 < train_frac < 1.
std::pair<std::vector<TrainingTuple>, std::vector<TrainingTuple>> split(const std::vector<TrainingTuple>& tuples,
                                                                         double train_frac);

}  // namespace dvlfill
