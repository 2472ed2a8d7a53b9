#include <cmath>

#include <gtest/gtest.h>

#include "../support/fd_oracle.hpp"
#include "dvlfill/dataset.hpp"
#include "dvlfill/network.hpp"
#include "dvlfill/training.hpp"
#include "dvlfill/trajectory.hpp"

using namespace dvlfill;
using namespace dvlfill::nn;

namespace {

std::vector<TrainingTuple> tuples(std::size_t window_len, std::size_t count) {
  const SimulatedRun run = simulate(static_cast<double>(count) + 1.0, TrajectoryProfile{}, BeamGeometry(),
                                    DvlErrorParams{}, 12);
  AssembleOptions opt;
  opt.window_len = window_len;
  opt.window_s = static_cast<double>(window_len) / 100.0;
  auto ts = assemble_tuples(run.imu, run.dvl, run.truth, BeamMask::with_missing({2, 4}), opt).tuples;
  ts.resize(count);
  return ts;
}

NetworkConfig small(Activation conv, Activation hidden) {
  NetworkConfig cfg;
  cfg.window_len = 8;
  cfg.conv_filters = 2;
  cfg.kernel_size = 3;
  cfg.conv_activation = conv;
  cfg.hidden = {5, 4};
  cfg.hidden_activation = hidden;
  return cfg;
}

void check_all(const NetworkConfig& cfg) {
  const auto ts = tuples(cfg.window_len, 4);
  const ModelCheckpoint model = init_checkpoint(cfg, compute_norm_stats(ts), 21);
  const Batch batch = make_batch(ts, model.norm, cfg.window_len);
  const LossGradient lg = loss_and_gradient(model, batch);
  dvlfill::testing::FiniteDifferenceOracle oracle(model, batch);
  EXPECT_NEAR(oracle.loss(), lg.loss, 1e-12 * std::max(1.0, lg.loss));
  for (std::size_t i = 0; i < model.params.size(); ++i) {
    const double fd = oracle.derivative(i, 1e-5);
    EXPECT_LT(std::abs(lg.grad[i] - fd) / std::max(1.0, std::abs(lg.grad[i])), 1e-6) << "parameter " << i;
  }
  EXPECT_EQ(oracle.kink_crossings(), 0u);
}

}  // namespace

TEST(Gradient, SmallReluNetwork) { check_all(small(Activation::relu, Activation::relu)); }
TEST(Gradient, SmallTanhNetwork) { check_all(small(Activation::tanh, Activation::tanh)); }
TEST(Gradient, SmallLinearConvNetwork) { check_all(small(Activation::linear, Activation::relu)); }

TEST(Gradient, SingleHiddenLayer) {
  NetworkConfig cfg = small(Activation::relu, Activation::tanh);
  cfg.hidden = {3};
  check_all(cfg);
}

TEST(Gradient, ZeroLossGivesZeroGradient) {
  const NetworkConfig cfg = small(Activation::relu, Activation::relu);
  const auto ts = tuples(cfg.window_len, 4);
  const ModelCheckpoint model = init_checkpoint(cfg, compute_norm_stats(ts), 2);
  Batch batch = make_batch(ts, model.norm, cfg.window_len);
  batch.target = forward_batch(model, batch);
  const LossGradient lg = loss_and_gradient(model, batch);
  EXPECT_EQ(lg.loss, 0.0);
  for (double g : lg.grad) EXPECT_EQ(g, 0.0);
}

TEST(Gradient, LossScaleIsLinear) {
  const NetworkConfig cfg = small(Activation::relu, Activation::relu);
  const auto ts = tuples(cfg.window_len, 4);
  const ModelCheckpoint model = init_checkpoint(cfg, compute_norm_stats(ts), 2);
  const Batch batch = make_batch(ts, model.norm, cfg.window_len);
  const LossGradient a = loss_and_gradient(model, batch, nullptr, 1.0);
  const LossGradient b = loss_and_gradient(model, batch, nullptr, 2.0);
  for (std::size_t i = 0; i < a.grad.size(); ++i) EXPECT_DOUBLE_EQ(b.grad[i], 2.0 * a.grad[i]);
}

TEST(Gradient, DropoutMaskEntersGradient) {
  const NetworkConfig cfg = small(Activation::relu, Activation::relu);
  const auto ts = tuples(cfg.window_len, 4);
  const ModelCheckpoint model = init_checkpoint(cfg, compute_norm_stats(ts), 2);
  const Batch batch = make_batch(ts, model.norm, cfg.window_len);
  const Matrix ones = Matrix::Ones(batch.rows(), static_cast<Eigen::Index>(cfg.fused_features()));
  const LossGradient plain = loss_and_gradient(model, batch);
  const LossGradient masked = loss_and_gradient(model, batch, &ones);
  EXPECT_EQ(plain.grad, masked.grad);
}

TEST(Gradient, ParallelMatchesSerial) {
  const NetworkConfig cfg = small(Activation::relu, Activation::relu);
  const auto ts = tuples(cfg.window_len, 40);
  const ModelCheckpoint model = init_checkpoint(cfg, compute_norm_stats(ts), 2);
  const Batch batch = make_batch(ts, model.norm, cfg.window_len);
  const LossGradient serial = loss_and_gradient(model, batch);
  const LossGradient d1 = parallel_loss_and_gradient(model, batch, nullptr, 1, true);
  const LossGradient d3 = parallel_loss_and_gradient(model, batch, nullptr, 3, true);
  const LossGradient nd = parallel_loss_and_gradient(model, batch, nullptr, 3, false);
  EXPECT_EQ(d1.grad, d3.grad);
  EXPECT_EQ(d1.loss, d3.loss);
  for (std::size_t i = 0; i < serial.grad.size(); ++i) {
    EXPECT_NEAR(d1.grad[i], serial.grad[i], 1e-12);
    EXPECT_NEAR(nd.grad[i], serial.grad[i], 1e-12);
  }
}
