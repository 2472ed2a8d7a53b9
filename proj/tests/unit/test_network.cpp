#include <cmath>

#include <gtest/gtest.h>

#include "../support/oracles.hpp"
#include "dvlfill/dataset.hpp"
#include "dvlfill/errors.hpp"
#include "dvlfill/network.hpp"
#include "dvlfill/trajectory.hpp"

using namespace dvlfill;
using namespace dvlfill::nn;

namespace {

std::vector<TrainingTuple> tuples(double seconds, std::uint64_t seed = 1) {
  const SimulatedRun run = simulate(seconds, TrajectoryProfile{}, BeamGeometry(), DvlErrorParams{}, seed);
  return assemble_tuples(run.imu, run.dvl, run.truth, BeamMask::with_missing({2, 4})).tuples;
}

}  // namespace

TEST(Conv1d, ZeroInputGivesBias) {
  const Tensor out = conv1d_forward(Tensor({3, 10}), Tensor({2, 3, 2}, std::vector<double>(12, 0.7)),
                                    Tensor({2}, {0.25, -1.5}));
  ASSERT_EQ(out.shape, (std::vector<std::size_t>{2, 9}));
  for (std::size_t t = 0; t < 9; ++t) {
    EXPECT_EQ(out.values[t], 0.25);
    EXPECT_EQ(out.values[9 + t], -1.5);
  }
}

TEST(Conv1d, DeltaKernel) {
  Tensor in({1, 6});
  for (std::size_t t = 0; t < 6; ++t) in.values[t] = static_cast<double>(t * t);
  const Tensor out = conv1d_forward(in, Tensor({1, 1, 2}, {1.0, 0.0}), Tensor({1}, {0.0}));
  ASSERT_EQ(out.size(), 5u);
  for (std::size_t t = 0; t < 5; ++t) EXPECT_EQ(out.values[t], in.values[t]);
}

TEST(Conv1d, MatchesDirectSum) {
  RandomState rng(2);
  Tensor in({3, 100}), w({6, 3, 2}), b({6});
  for (auto& x : in.values) x = rng.gaussian();
  for (auto& x : w.values) x = rng.gaussian();
  for (auto& x : b.values) x = rng.gaussian();
  const Tensor out = conv1d_forward(in, w, b);
  ASSERT_EQ(out.shape, (std::vector<std::size_t>{6, 99}));
  const auto ref = dvlfill::testing::naive_conv1d(in.values, 3, 100, w.values, b.values, 6, 2);
  for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(out.values[i], ref[i], 1e-12);
}

TEST(Conv1d, ShapeErrors) {
  EXPECT_THROW(conv1d_forward(Tensor({3, 1}), Tensor({1, 3, 2}), Tensor({1})), ContractViolation);
  EXPECT_THROW(conv1d_forward(Tensor({2, 5}), Tensor({1, 3, 2}), Tensor({1})), ContractViolation);
  EXPECT_THROW(conv1d_forward(Tensor({3, 5}), Tensor({1, 3, 2}), Tensor({2})), ContractViolation);
}

TEST(Network, DefaultParameterCount) {
  const NetworkConfig cfg;
  EXPECT_EQ(cfg.conv_length(), 99u);
  EXPECT_EQ(cfg.head_features(), 594u);
  EXPECT_EQ(cfg.fused_features(), 1188u);
  const std::size_t expected = 2 * (6 * 3 * 2 + 6) + (1188 * 512 + 512) + (512 * 64 + 64) + (66 * 2 + 2);
  EXPECT_EQ(parameter_count(cfg), expected);
  EXPECT_EQ(expected, 641818u);
  const auto layout = parameter_layout(cfg);
  EXPECT_EQ(layout.front().name, "accel_conv.weight");
  EXPECT_EQ(layout.back().name, "output.bias");
  EXPECT_EQ(layout.back().offset + layout.back().size, expected);
}

TEST(Network, TopologyHashTracksEdits) {
  NetworkConfig a, b;
  EXPECT_EQ(a.topology_hash(), b.topology_hash());
  b.hidden = {512, 32};
  EXPECT_NE(a.topology_hash(), b.topology_hash());
  b = a;
  b.conv_activation = Activation::tanh;
  EXPECT_NE(a.topology_hash(), b.topology_hash());
}

TEST(Network, ZeroNetworkOutputsBias) {
  const auto ts = tuples(5.0);
  NormStats norm = compute_norm_stats(ts);
  ModelCheckpoint model = init_checkpoint(NetworkConfig{}, norm, 1);
  std::fill(model.params.begin(), model.params.end(), 0.0);
  const auto out_b = parameter_layout(model.config).back();
  model.params[out_b.offset] = 0.5;
  model.params[out_b.offset + 1] = -0.25;
  const Vec2 y = predict(ts[0].window, ts[0].partial_beams_mps, model);
  EXPECT_NEAR(y(0), norm.target_beams.mean[0] + 0.5 * norm.target_beams.std[0], 1e-12);
  EXPECT_NEAR(y(1), norm.target_beams.mean[1] - 0.25 * norm.target_beams.std[1], 1e-12);
}

TEST(Network, InferenceIsDeterministic) {
  const auto ts = tuples(5.0);
  const ModelCheckpoint model = init_checkpoint(NetworkConfig{}, compute_norm_stats(ts), 3);
  RandomState r1(1), r2(99);
  const Vec2 a = forward(ts[1].window, ts[1].partial_beams_mps, model, false, r1);
  const Vec2 b = forward(ts[1].window, ts[1].partial_beams_mps, model, false, r2);
  EXPECT_EQ(a, b);
  EXPECT_EQ(r1.next_u64(), RandomState(1).next_u64());
  const Matrix batch = predict_tuples(ts, model);
  EXPECT_NEAR(batch(1, 0), a(0), 1e-12);
  EXPECT_NEAR(batch(1, 1), a(1), 1e-12);
}

TEST(Network, TrainingModeIsSeeded) {
  const auto ts = tuples(5.0);
  const ModelCheckpoint model = init_checkpoint(NetworkConfig{}, compute_norm_stats(ts), 3);
  RandomState r1(5), r2(5);
  EXPECT_EQ(forward(ts[1].window, ts[1].partial_beams_mps, model, true, r1),
            forward(ts[1].window, ts[1].partial_beams_mps, model, true, r2));
}

TEST(Dropout, KeptFractionWithinBinomialBound) {
  RandomState rng(8);
  const Matrix scale = make_dropout_scale(1, 1188, 0.2, rng);
  std::size_t kept = 0;
  for (Eigen::Index j = 0; j < scale.cols(); ++j) {
    if (scale(0, j) != 0.0) {
      EXPECT_DOUBLE_EQ(scale(0, j), 1.0 / 0.8);
      ++kept;
    }
  }
  const double sigma = std::sqrt(1188 * 0.8 * 0.2);
  EXPECT_NEAR(static_cast<double>(kept), 1188 * 0.8, 3 * sigma);
}

TEST(Dropout, InvertedScalingPreservesMean) {
  RandomState rng(8);
  const Matrix scale = make_dropout_scale(400, 1188, 0.2, rng);
  EXPECT_NEAR(scale.mean(), 1.0, 0.01);
}

TEST(Network, FiniteWithinTenTimesNormRange) {
  auto ts = tuples(20.0);
  const ModelCheckpoint model = init_checkpoint(NetworkConfig{}, compute_norm_stats(ts), 4);
  for (auto& t : ts) {
    t.window.accel_mps2 *= 10.0;
    t.window.gyro_radps *= 10.0;
    t.partial_beams_mps *= 10.0;
  }
  const Matrix out = predict_tuples(ts, model);
  EXPECT_TRUE(out.allFinite());
}

TEST(Network, MissingStatsRejected) {
  const auto ts = tuples(5.0);
  ModelCheckpoint model = init_checkpoint(NetworkConfig{}, compute_norm_stats(ts), 4);
  model.norm.gyro.std.clear();
  EXPECT_THROW((void)predict(ts[0].window, ts[0].partial_beams_mps, model), ContractViolation);
}

TEST(NormStats, ComputedFromTuples) {
  const auto ts = tuples(30.0);
  const NormStats n = compute_norm_stats(ts);
  double mean = 0.0;
  for (const auto& t : ts) mean += t.target_beams_mps(0);
  EXPECT_NEAR(n.target_beams.mean[0], mean / static_cast<double>(ts.size()), 1e-12);
  for (double s : n.accel.std) EXPECT_GT(s, 0.0);
  EXPECT_NO_THROW(n.validate());
  EXPECT_NO_THROW(identity_stats().validate());
}
