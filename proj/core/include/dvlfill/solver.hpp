// Least-squares body velocity from beam velocities.
#pragma once

#include <Eigen/Core>

#include "dvlfill/geometry.hpp"

namespace dvlfill {

/// Relative singular-value threshold below which H is treated as rank deficient.
inline constexpr double kRankTolerance = 1e-10;

struct VelocityEstimate {
  Vec3 v_body_mps = Vec3::Zero();
  int n_beams_used = 0;
  double condition_number = 1.0;
};

/// argmin ||y - H v||^2 via SVD of H (k x 3).
///
/// Throws InsufficientBeams when k < 3 and DegenerateGeometry when the
/// smallest singular value is below kRankTolerance times the largest.
VelocityEstimate solve_velocity(const Eigen::VectorXd& y, const ReducedBeamMatrix& h);

/// Places `measured` at the available beams of `mask` and `regressed` at the
/// missing ones, in beam order.
Vec4 interleave_beams(const Vec2& measured, const Vec2& regressed, BeamMask mask);

/// Full-H solve after filling the two missing beams with regressed values.
/// Throws ContractViolation unless mask.count() == 2.
VelocityEstimate solve_with_regressed(const Vec2& measured, const Vec2& regressed, BeamMask mask,
                                      const BeamMatrix& h);

}  // namespace dvlfill
