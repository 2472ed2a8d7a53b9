// Independent reference implementations used by the tests. Nothing here calls
// the library code it is checking.
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace dvlfill::testing {

/// (H^T H)^-1 H^T y with the 3x3 inverse written out via cofactors.
inline Eigen::Vector3d normal_equations_solve(const Eigen::VectorXd& y, const Eigen::MatrixXd& h) {
  double a[3][3] = {};
  double b[3] = {};
  for (Eigen::Index r = 0; r < h.rows(); ++r) {
    for (int i = 0; i < 3; ++i) {
      b[i] += h(r, i) * y(r);
      for (int j = 0; j < 3; ++j) a[i][j] += h(r, i) * h(r, j);
    }
  }
  const double c00 = a[1][1] * a[2][2] - a[1][2] * a[2][1];
  const double c01 = a[1][2] * a[2][0] - a[1][0] * a[2][2];
  const double c02 = a[1][0] * a[2][1] - a[1][1] * a[2][0];
  const double c10 = a[0][2] * a[2][1] - a[0][1] * a[2][2];
  const double c11 = a[0][0] * a[2][2] - a[0][2] * a[2][0];
  const double c12 = a[0][1] * a[2][0] - a[0][0] * a[2][1];
  const double c20 = a[0][1] * a[1][2] - a[0][2] * a[1][1];
  const double c21 = a[0][2] * a[1][0] - a[0][0] * a[1][2];
  const double c22 = a[0][0] * a[1][1] - a[0][1] * a[1][0];
  const double det = a[0][0] * c00 + a[0][1] * c01 + a[0][2] * c02;
  // inverse = adjugate / det, adjugate = transpose of the cofactor matrix
  const double inv[3][3] = {{c00 / det, c10 / det, c20 / det},
                            {c01 / det, c11 / det, c21 / det},
                            {c02 / det, c12 / det, c22 / det}};
  Eigen::Vector3d v;
  for (int i = 0; i < 3; ++i) v(i) = inv[i][0] * b[0] + inv[i][1] * b[1] + inv[i][2] * b[2];
  return v;
}

/// Direct-sum valid cross-correlation. in: C x T row-major, w: F x C x K.
inline std::vector<double> naive_conv1d(const std::vector<double>& in, std::size_t channels, std::size_t len,
                                        const std::vector<double>& w, const std::vector<double>& bias,
                                        std::size_t filters, std::size_t kernel) {
  const std::size_t out_len = len - kernel + 1;
  std::vector<double> out(filters * out_len, 0.0);
  for (std::size_t f = 0; f < filters; ++f) {
    for (std::size_t t = 0; t < out_len; ++t) {
      double acc = bias[f];
      for (std::size_t c = 0; c < channels; ++c) {
        for (std::size_t k = 0; k < kernel; ++k) acc += w[(f * channels + c) * kernel + k] * in[c * len + t + k];
      }
      out[f * out_len + t] = acc;
    }
  }
  return out;
}

}  // namespace dvlfill::testing
