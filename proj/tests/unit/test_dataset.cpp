#include <gtest/gtest.h>

#include "dvlfill/dataset.hpp"
#include "dvlfill/errors.hpp"
#include "dvlfill/trajectory.hpp"

using namespace dvlfill;

namespace {

SimulatedRun small_run(double seconds = 60.0) {
  return simulate(seconds, TrajectoryProfile{}, BeamGeometry(), DvlErrorParams{}, 3);
}

}  // namespace

TEST(Assemble, SixtySecondRun) {
  const SimulatedRun run = small_run();
  const TupleSet set = assemble_tuples(run.imu, run.dvl, run.truth, BeamMask::with_missing({2, 4}));
  EXPECT_GE(set.tuples.size(), 59u);
  EXPECT_LE(set.tuples.size(), 60u);
  EXPECT_EQ(set.tuples.size() + set.gaps.count(), run.dvl.size());
  for (const auto& t : set.tuples) {
    EXPECT_EQ(t.window.length(), 100);
    EXPECT_EQ(t.window.gyro_radps.rows(), 100);
  }
}

TEST(Assemble, TupleConsistency) {
  const SimulatedRun run = small_run();
  const TupleSet set = assemble_tuples(run.imu, run.dvl, run.truth, BeamMask::with_missing({2, 4}));
  for (std::size_t i = 0; i < set.tuples.size(); ++i) {
    const TrainingTuple& t = set.tuples[i];
    const DvlSample& s = run.dvl[i];
    ASSERT_DOUBLE_EQ(t.window.epoch_s, s.epoch_s);
    EXPECT_EQ(t.partial_beams_mps, Vec2(s.beams_mps(0), s.beams_mps(2)));
    EXPECT_EQ(t.target_beams_mps, Vec2(s.beams_mps(1), s.beams_mps(3)));
    EXPECT_EQ(t.v_true_mps, run.truth[i].v_mps);
    EXPECT_EQ(t.mask.count(), 2);
    // window ends at the epoch sample
    const std::size_t last = static_cast<std::size_t>(s.epoch_s * 100.0) - 1;
    EXPECT_EQ(t.window.accel_mps2.row(99).transpose(), run.imu[last].accel_mps2);
  }
}

TEST(Assemble, ImuGapSkipsEpoch) {
  SimulatedRun run = small_run(20.0);
  run.imu.erase(run.imu.begin() + 450, run.imu.begin() + 460);  // inside (4, 5]
  const TupleSet set = assemble_tuples(run.imu, run.dvl, run.truth, BeamMask::with_missing({2, 4}));
  EXPECT_EQ(set.gaps.imu_gaps, 1u);
  ASSERT_EQ(set.gaps.skipped_epochs.size(), 1u);
  EXPECT_DOUBLE_EQ(set.gaps.skipped_epochs[0], 5.0);
  EXPECT_EQ(set.tuples.size() + set.gaps.count(), run.dvl.size());
}

TEST(Assemble, InvalidBeamAndMissingTruth) {
  SimulatedRun run = small_run(20.0);
  run.dvl[3].validity = BeamMask::with_missing({1});
  run.dvl[4].validity = BeamMask::with_missing({2});
  run.truth.erase(run.truth.begin() + 7);
  const TupleSet set = assemble_tuples(run.imu, run.dvl, run.truth, BeamMask::with_missing({2, 4}));
  EXPECT_EQ(set.gaps.invalid_beams, 2u);
  EXPECT_EQ(set.gaps.missing_truth, 1u);
  EXPECT_EQ(set.tuples.size(), 17u);
}

TEST(Assemble, RequiresTwoBeamMask) {
  const SimulatedRun run = small_run(5.0);
  EXPECT_THROW(assemble_tuples(run.imu, run.dvl, run.truth, BeamMask::with_missing({2})), ContractViolation);
}

TEST(Assemble, FieldShapedCounts) {
  // 2,001 DVL epochs with 200,100 IMU samples; only the synthetic shape matters here.
  ImuSeries imu;
  imu.reserve(200100);
  for (std::size_t k = 1; k <= 200100; ++k) imu.push_back({static_cast<double>(k) / 100.0, Vec3::Zero(), Vec3::Zero()});
  DvlSeries dvl;
  TruthSeries truth;
  for (std::size_t e = 1; e <= 2001; ++e) {
    dvl.push_back({static_cast<double>(e), Vec4::Zero(), BeamMask::all()});
    truth.push_back({static_cast<double>(e), Vec3::Zero()});
  }
  const TupleSet set = assemble_tuples(imu, dvl, truth, BeamMask::with_missing({2, 4}));
  EXPECT_LE(set.tuples.size(), 2001u);
  EXPECT_GE(set.tuples.size(), 2000u);
}

TEST(Split, ContiguousEightyTwenty) {
  const SimulatedRun run = simulate(100.0, TrajectoryProfile{}, BeamGeometry(), DvlErrorParams{}, 1);
  const TupleSet set = assemble_tuples(run.imu, run.dvl, run.truth, BeamMask::with_missing({2, 4}));
  ASSERT_EQ(set.tuples.size(), 100u);
  const auto [train, val] = split(set.tuples, 0.8);
  EXPECT_EQ(train.size(), 80u);
  EXPECT_EQ(val.size(), 20u);
  EXPECT_LT(train.back().window.epoch_s, val.front().window.epoch_s);
  const auto [a, b] = split(set.tuples, 0.5);
  const auto [c, d] = split(set.tuples, 0.5);
  EXPECT_EQ(a.size(), c.size());
  EXPECT_DOUBLE_EQ(a.back().window.epoch_s, c.back().window.epoch_s);
  EXPECT_THROW(split(set.tuples, 0.0), DomainError);
  EXPECT_THROW(split(set.tuples, 1.0), DomainError);
}

TEST(TruthFromBeams, IdealSensorRecoversVelocity) {
  const SimulatedRun run = simulate(10.0, TrajectoryProfile{}, BeamGeometry(), DvlErrorParams::ideal(), 2);
  const TruthSeries truth = truth_from_beams(run.dvl, BeamGeometry());
  ASSERT_EQ(truth.size(), run.truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) EXPECT_LT((truth[i].v_mps - run.truth[i].v_mps).norm(), 1e-12);
}
