#include "dvlfill/trajectory.hpp"

#include <cmath>
#include <numbers>

#include "dvlfill/errors.hpp"

namespace dvlfill {
namespace {

std::size_t sample_count(double duration_s, double rate_hz) {
  if (!(duration_s > 0.0)) return 0;
  return static_cast<std::size_t>(std::floor(duration_s * rate_hz + 1e-9));
}

}  // namespace

TrajectoryProfile TrajectoryProfile::constant_velocity(double speed) {
  TrajectoryProfile p;
  p.target_speed_mps = speed;
  p.surge_rms_fraction = 0.0;
  p.sway_amplitude_mps = 0.0;
  p.heave_amplitude_mps = 0.0;
  p.yaw_rate_amplitude_radps = 0.0;
  p.accel_noise_mps2 = 0.0;
  p.gyro_noise_radps = 0.0;
  return p;
}

MotionModel::MotionModel(const TrajectoryProfile& profile, double duration_s, std::uint64_t seed)
    : profile_(profile) {
  if (profile.harmonics < 1) throw DomainError("trajectory profile needs at least one harmonic per axis");
  if (!(profile.min_period_s > 0.0 && profile.max_period_s >= profile.min_period_s)) {
    throw DomainError("trajectory periods must satisfy 0 < min_period_s <= max_period_s");
  }
  if (!(profile.imu_rate_hz > 0.0)) throw DomainError("imu_rate_hz must be positive");

  RandomState rng(derive_seed(seed, "motion"));
  const auto draw = [&](double peak, bool rms_normalised) {
    std::vector<Harmonic> hs(static_cast<std::size_t>(profile.harmonics));
    double weight_sum = 0.0;
    double weight_sq = 0.0;
    for (auto& h : hs) {
      h.amplitude = rng.uniform(0.5, 1.0);
      const double period = rng.uniform(profile.min_period_s, profile.max_period_s);
      h.omega = 2.0 * std::numbers::pi / period;
      h.phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      weight_sum += h.amplitude;
      weight_sq += h.amplitude * h.amplitude;
    }
    // RMS of sum a_k sin(.) is sqrt(sum a_k^2 / 2); the peak is at most sum a_k.
    const double norm = rms_normalised ? peak * std::sqrt(2.0 / weight_sq) : peak / weight_sum;
    for (auto& h : hs) h.amplitude *= norm;
    return hs;
  };
  surge_ = draw(profile.surge_rms_fraction, true);
  sway_ = draw(profile.sway_amplitude_mps, false);
  heave_ = draw(profile.heave_amplitude_mps, false);
  yaw_rate_ = draw(profile.yaw_rate_amplitude_radps, false);

  const std::size_t n = sample_count(duration_s, profile.imu_rate_hz);
  if (n > 0) {
    double speed_sum = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
      speed_sum += unscaled(static_cast<double>(k) / profile.imu_rate_hz).v_body.norm();
    }
    const double mean_speed = speed_sum / static_cast<double>(n);
    if (mean_speed > 0.0) scale_ = profile.target_speed_mps / mean_speed;
  }
}

double MotionModel::sum(const std::vector<Harmonic>& hs, double t) const {
  double s = 0.0;
  for (const auto& h : hs) s += h.amplitude * std::sin(h.omega * t + h.phase);
  return s;
}

double MotionModel::sum_rate(const std::vector<Harmonic>& hs, double t) const {
  double s = 0.0;
  for (const auto& h : hs) s += h.amplitude * h.omega * std::cos(h.omega * t + h.phase);
  return s;
}

MotionState MotionModel::unscaled(double t) const {
  const double u = profile_.target_speed_mps;
  MotionState m;
  m.v_body = Vec3(u * (1.0 + sum(surge_, t)), sum(sway_, t), sum(heave_, t));
  m.dv_body = Vec3(u * sum_rate(surge_, t), sum_rate(sway_, t), sum_rate(heave_, t));
  return m;
}

MotionState MotionModel::at(double t) const {
  MotionState m = unscaled(t);
  m.v_body *= scale_;
  m.dv_body *= scale_;

  const double surge_dev = m.v_body.x() - scale_ * profile_.target_speed_mps;
  double yaw = 0.0;
  for (const auto& h : yaw_rate_) yaw -= h.amplitude / h.omega * std::cos(h.omega * t + h.phase);

  m.attitude = Vec3(profile_.roll_per_sway * m.v_body.y(),
                    profile_.pitch_per_surge * surge_dev + profile_.pitch_per_heave * m.v_body.z(), yaw);
  m.attitude_rate = Vec3(profile_.roll_per_sway * m.dv_body.y(),
                         profile_.pitch_per_surge * m.dv_body.x() + profile_.pitch_per_heave * m.dv_body.z(),
                         sum(yaw_rate_, t));
  return m;
}

Vec3 gravity_specific_force(double roll, double pitch) {
  return kGravity * Vec3(std::sin(pitch), -std::sin(roll) * std::cos(pitch), -std::cos(roll) * std::cos(pitch));
}

Vec3 body_rates(const Vec3& attitude, const Vec3& attitude_rate) {
  const double roll = attitude.x();
  const double pitch = attitude.y();
  const double droll = attitude_rate.x();
  const double dpitch = attitude_rate.y();
  const double dyaw = attitude_rate.z();
  return Vec3(droll - dyaw * std::sin(pitch),
              dpitch * std::cos(roll) + dyaw * std::sin(roll) * std::cos(pitch),
              -dpitch * std::sin(roll) + dyaw * std::cos(roll) * std::cos(pitch));
}

Trajectory generate_trajectory(double duration_s, const TrajectoryProfile& profile, std::uint64_t seed) {
  const MotionModel model(profile, duration_s, seed);
  RandomState noise(derive_seed(seed, "imu-noise"));

  const std::size_t n = sample_count(duration_s, profile.imu_rate_hz);
  Trajectory traj;
  traj.t.reserve(n);
  traj.v_body.reserve(n);
  traj.accel.reserve(n);
  traj.gyro.reserve(n);
  traj.attitude.reserve(n);

  for (std::size_t k = 1; k <= n; ++k) {
    const double t = static_cast<double>(k) / profile.imu_rate_hz;
    const MotionState m = model.at(t);
    Vec3 accel = m.dv_body + gravity_specific_force(m.attitude.x(), m.attitude.y());
    Vec3 gyro = body_rates(m.attitude, m.attitude_rate);
    for (Eigen::Index i = 0; i < 3; ++i) accel(i) += profile.accel_noise_mps2 * noise.gaussian();
    for (Eigen::Index i = 0; i < 3; ++i) gyro(i) += profile.gyro_noise_radps * noise.gaussian();
    traj.t.push_back(t);
    traj.v_body.push_back(m.v_body);
    traj.accel.push_back(accel);
    traj.gyro.push_back(gyro);
    traj.attitude.push_back(m.attitude);
  }
  return traj;
}

SimulatedRun simulate(double duration_s, const TrajectoryProfile& profile, const BeamGeometry& geometry,
                      const DvlErrorParams& errors, std::uint64_t seed) {
  errors.validate();
  const Trajectory traj = generate_trajectory(duration_s, profile, seed);
  const MotionModel model(profile, duration_s, seed);

  SimulatedRun run;
  run.imu.reserve(traj.t.size());
  for (std::size_t k = 0; k < traj.t.size(); ++k) {
    run.imu.push_back(ImuSample{traj.t[k], traj.accel[k], traj.gyro[k]});
  }

  RandomState dvl_noise(errors.seed);
  const std::size_t epochs = duration_s > 0.0 ? static_cast<std::size_t>(std::floor(duration_s + 1e-9)) : 0;
  double speed_sum = 0.0;
  for (std::size_t e = 1; e <= epochs; ++e) {
    const double t = static_cast<double>(e);
    const Vec3 v = model.at(t).v_body;
    run.dvl.push_back(DvlSample{t, corrupt_beams(v, geometry.h(), errors, dvl_noise), BeamMask::all()});
    run.truth.push_back(TruthSample{t, v});
    speed_sum += v.norm();
  }
  if (epochs > 0) run.mean_speed_mps = speed_sum / static_cast<double>(epochs);
  return run;
}

}  // namespace dvlfill
