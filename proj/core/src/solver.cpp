#include "dvlfill/solver.hpp"

#include <Eigen/SVD>
#include <fmt/format.h>

#include "dvlfill/errors.hpp"

namespace dvlfill {

VelocityEstimate solve_velocity(const Eigen::VectorXd& y, const ReducedBeamMatrix& h) {
  if (h.rows() != y.size()) {
    throw ContractViolation(fmt::format("beam vector has {} entries but H has {} rows", y.size(), h.rows()));
  }
  if (h.rows() < 3) {
    throw InsufficientBeams(
        fmt::format("{} beam(s) available; at least 3 are needed to observe the velocity vector", h.rows()));
  }

  const Eigen::JacobiSVD<ReducedBeamMatrix> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec3 sv = svd.singularValues();
  if (!(sv(0) > 0.0) || sv(2) <= kRankTolerance * sv(0)) {
    throw DegenerateGeometry(fmt::format("beam matrix is rank deficient (singular values {:g}, {:g}, {:g})", sv(0),
                                         sv(1), sv(2)));
  }

  VelocityEstimate est;
  const Vec3 projected = svd.matrixU().transpose() * y;
  est.v_body_mps = svd.matrixV() * projected.cwiseQuotient(sv);
  est.n_beams_used = static_cast<int>(h.rows());
  est.condition_number = sv(0) / sv(2);
  return est;
}

Vec4 interleave_beams(const Vec2& measured, const Vec2& regressed, BeamMask mask) {
  if (mask.count() != 2) {
    throw ContractViolation(fmt::format("beam mask {} must have exactly two available beams", mask.to_string()));
  }
  Vec4 y;
  Eigen::Index m = 0;
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < kNumBeams; ++i) {
    y(static_cast<Eigen::Index>(i)) = mask[i] ? measured(m++) : regressed(r++);
  }
  return y;
}

VelocityEstimate solve_with_regressed(const Vec2& measured, const Vec2& regressed, BeamMask mask,
                                      const BeamMatrix& h) {
  const Vec4 y = interleave_beams(measured, regressed, mask);
  return solve_velocity(y, h);
}

}  // namespace dvlfill
