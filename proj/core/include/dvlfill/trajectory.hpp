// Synthetic vehicle motion and the 100 Hz IMU / 1 Hz DVL records it produces.
//
// Body velocity is a sum of low-frequency sinusoids per axis, rescaled so the
// mean speed over the run equals the configured target. The vehicle attitude
// follows a linear trim model driven by the velocity state (pitch tracks surge
// and optionally heave, roll tracks sway) plus an independent yaw oscillation,
// which is what lets an inertial window carry information about the velocity.
#pragma once

#include <cstdint>
#include <vector>

#include "dvlfill/dataset.hpp"
#include "dvlfill/error_model.hpp"
#include "dvlfill/geometry.hpp"

namespace dvlfill {

inline constexpr double kGravity = 9.80665;

struct TrajectoryProfile {
  double target_speed_mps = 1.2;
  double surge_rms_fraction = 0.25;  ///< surge swing RMS relative to the mean
  double sway_amplitude_mps = 0.1;
  double heave_amplitude_mps = 0.1;
  int harmonics = 3;                 ///< sinusoids per axis
  double min_period_s = 60.0;
  double max_period_s = 150.0;
  double pitch_per_surge = 0.3;      ///< rad per m/s of surge deviation
  double pitch_per_heave = 0.0;      ///< rad per m/s of heave
  double roll_per_sway = 0.5;        ///< rad per m/s of sway
  double yaw_rate_amplitude_radps = 0.02;
  double accel_noise_mps2 = 0.01;
  double gyro_noise_radps = 0.001;
  double imu_rate_hz = 100.0;

  /// Steady straight-and-level motion at `speed` along body x, no IMU noise.
  static TrajectoryProfile constant_velocity(double speed);
};

/// Closed-form motion state at time t.
struct MotionState {
  Vec3 v_body = Vec3::Zero();     ///< m/s
  Vec3 dv_body = Vec3::Zero();    ///< m/s^2, time derivative of v_body
  Vec3 attitude = Vec3::Zero();   ///< roll, pitch, yaw [rad]
  Vec3 attitude_rate = Vec3::Zero();
};

/// Deterministic velocity/attitude model drawn from a profile and a seed.
class MotionModel {
 public:
  MotionModel(const TrajectoryProfile& profile, double duration_s, std::uint64_t seed);

  MotionState at(double t) const;
  double velocity_scale() const { return scale_; }

 private:
  struct Harmonic {
    double amplitude;
    double omega;
    double phase;
  };

  double sum(const std::vector<Harmonic>& hs, double t) const;
  double sum_rate(const std::vector<Harmonic>& hs, double t) const;
  MotionState unscaled(double t) const;

  TrajectoryProfile profile_;
  std::vector<Harmonic> surge_, sway_, heave_, yaw_rate_;
  double scale_ = 1.0;
};

/// Specific-force contribution of gravity in the body frame for the given
/// roll/pitch (NED navigation frame, z down): -C_bn * [0, 0, g].
Vec3 gravity_specific_force(double roll, double pitch);

/// Body angular rate from Euler angles and their rates (ZYX convention).
Vec3 body_rates(const Vec3& attitude, const Vec3& attitude_rate);

struct Trajectory {
  std::vector<double> t;
  std::vector<Vec3> v_body;
  std::vector<Vec3> accel;     ///< emitted specific force incl. noise
  std::vector<Vec3> gyro;      ///< emitted angular rate incl. noise
  std::vector<Vec3> attitude;  ///< roll, pitch, yaw
};

/// IMU samples at t = k / imu_rate_hz for k = 1 .. duration_s * imu_rate_hz.
Trajectory generate_trajectory(double duration_s, const TrajectoryProfile& profile, std::uint64_t seed);

struct SimulatedRun {
  ImuSeries imu;
  DvlSeries dvl;      ///< corrupted beams (unit under test)
  TruthSeries truth;  ///< true body velocity at each DVL epoch
  double mean_speed_mps = 0.0;
};

/// Full sensor simulation: IMU from `generate_trajectory`, DVL at 1 Hz epochs
/// t = 1, 2, ..., floor(duration_s), beams corrupted by `errors`.
SimulatedRun simulate(double duration_s, const TrajectoryProfile& profile, const BeamGeometry& geometry,
                      const DvlErrorParams& errors, std::uint64_t seed);

}  // namespace dvlfill
