// DVL beam error model: scale factor, bias and white Gaussian noise applied
// to the ideal beam velocities.
#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "dvlfill/geometry.hpp"
#include "dvlfill/random.hpp"

namespace dvlfill {

struct DvlErrorParams {
  Vec4 scale = Vec4::Constant(0.007);      ///< dimensionless, per beam
  Vec4 bias_mps = Vec4::Constant(0.0001);  ///< m/s, per beam
  double noise_std_mps = 0.042;            ///< m/s, i.i.d. across beams and epochs
  std::uint64_t seed = 0;

  /// Throws DomainError if noise_std_mps < 0 or any scale <= -1.
  void validate() const;

  /// Error-free sensor (s = 0, b = 0, sigma = 0).
  static DvlErrorParams ideal();
};

/// y_i = (1 + s_i) (H v)_i + b_i + n_i, n_i ~ N(0, sigma^2).
///
/// Four Gaussian deviates are drawn from `rng` per call, in beam order, even
/// when sigma is zero, so the stream position depends only on the call count.
Vec4 corrupt_beams(const Vec3& v_body, const BeamMatrix& h, const DvlErrorParams& params, RandomState& rng);

/// Entries of `y` at available positions, in beam order.
Eigen::VectorXd apply_mask(const Vec4& y, BeamMask mask);

}  // namespace dvlfill
