#include "dvlfill/error_model.hpp"

#include <fmt/format.h>

#include "dvlfill/errors.hpp"

namespace dvlfill {

void DvlErrorParams::validate() const {
  if (!(noise_std_mps >= 0.0)) {
    throw DomainError(fmt::format("noise_std_mps must be >= 0, got {}", noise_std_mps));
  }
  for (Eigen::Index i = 0; i < 4; ++i) {
    if (!(scale(i) > -1.0)) {
      throw DomainError(fmt::format("scale factor of beam {} must be > -1, got {}", i + 1, scale(i)));
    }
  }
}

DvlErrorParams DvlErrorParams::ideal() {
  DvlErrorParams p;
  p.scale.setZero();
  p.bias_mps.setZero();
  p.noise_std_mps = 0.0;
  return p;
}

Vec4 corrupt_beams(const Vec3& v_body, const BeamMatrix& h, const DvlErrorParams& params, RandomState& rng) {
  const Vec4 ideal = h * v_body;
  Vec4 y;
  for (Eigen::Index i = 0; i < 4; ++i) {
    const double noise = rng.gaussian();
    y(i) = (1.0 + params.scale(i)) * ideal(i) + params.bias_mps(i) + params.noise_std_mps * noise;
  }
  return y;
}

Eigen::VectorXd apply_mask(const Vec4& y, BeamMask mask) {
  Eigen::VectorXd out(mask.count());
  Eigen::Index k = 0;
  for (std::size_t i = 0; i < kNumBeams; ++i) {
    if (mask[i]) out(k++) = y(static_cast<Eigen::Index>(i));
  }
  return out;
}

}  // namespace dvlfill
