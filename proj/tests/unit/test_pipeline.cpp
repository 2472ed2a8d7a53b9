#include <filesystem>

#include <gtest/gtest.h>

#include "dvlfill/csv.hpp"
#include "dvlfill/errors.hpp"
#include "dvlfill/pipeline.hpp"
#include "dvlfill/trajectory.hpp"

using namespace dvlfill;
namespace fs = std::filesystem;

namespace {

RunConfig small_config() {
  RunConfig c = RunConfig::from_json(R"({"simulation": {"duration_s": 120, "test_duration_s": 0}})");
  return c;
}

std::vector<TrainingTuple> simulated(const RunConfig& c) {
  const SimulatedRun run =
      simulate(c.simulation.duration_s, c.simulation.profile, c.geometry(), c.error_model, c.simulation.seed);
  return build_tuples(LoadedData{run.imu, run.dvl, run.truth}, c).tuples;
}

}  // namespace

TEST(Pipeline, OracleRegressorIsExact) {
  const RunConfig c = small_config();
  const RunConfig ideal = RunConfig::from_json(
      R"({"simulation": {"duration_s": 120}, "error_model": {"scale": 0, "bias_mps": 0, "noise_std_mps": 0}})");
  const auto ts = simulated(ideal);
  const EvaluationResult r = evaluate_regressor(ts, oracle_regressor(), ideal.geometry());
  EXPECT_LT(r.report.rmse_mps, 1e-12);
  EXPECT_NEAR(*r.report.vaf, 100.0, 1e-8);
  EXPECT_EQ(r.report.n, ts.size());
}

TEST(Pipeline, MeanBaselinePredictsTargetMeans) {
  const RunConfig c = small_config();
  const auto ts = simulated(c);
  const nn::NormStats norm = nn::compute_norm_stats(ts);
  const auto pred = mean_beam_regressor(norm)(ts);
  ASSERT_EQ(pred.size(), ts.size());
  EXPECT_EQ(pred.front()(0), norm.target_beams.mean[0]);
  EXPECT_EQ(pred.back()(1), norm.target_beams.mean[1]);
}

TEST(Pipeline, LoadDatasetAppliesErrorModel) {
  const fs::path dir = fs::temp_directory_path() / "dvlfill_pipeline_test";
  fs::create_directories(dir);
  RunConfig c = small_config();
  const SimulatedRun clean =
      simulate(20.0, c.simulation.profile, c.geometry(), DvlErrorParams::ideal(), c.simulation.seed);
  write_imu_csv(dir / "imu.csv", clean.imu);
  write_dvl_csv(dir / "dvl.csv", clean.dvl);
  DataPaths paths{(dir / "imu.csv").string(), (dir / "dvl.csv").string(), "", true};
  const LoadedData data = load_dataset(paths, c);
  ASSERT_EQ(data.truth.size(), clean.truth.size());
  for (std::size_t i = 0; i < data.truth.size(); ++i) {
    EXPECT_LT((data.truth[i].v_mps - clean.truth[i].v_mps).norm(), 1e-12);
  }
  double diff = 0.0;
  for (std::size_t i = 0; i < data.dvl.size(); ++i) diff += (data.dvl[i].beams_mps - clean.dvl[i].beams_mps).norm();
  EXPECT_GT(diff, 0.0);
  paths.imu_csv = (dir / "none.csv").string();
  EXPECT_THROW(load_dataset(paths, c), CsvError);
  fs::remove_all(dir);
}

TEST(Pipeline, TrainModelStampsMetadata) {
  RunConfig c = small_config();
  c.training.epochs = 1;
  c.network.hidden = {8, 4};
  const auto ts = simulated(c);
  const auto [train_set, val_set] = split(ts, c.train_frac);
  const TrainResult r = train_model(c, train_set, val_set);
  EXPECT_EQ(r.final_checkpoint.meta.config_hash, c.hash());
  EXPECT_EQ(r.final_checkpoint.meta.missing_beams, c.missing_beams);
  EXPECT_EQ(r.final_checkpoint.meta.seed, c.network_seed);
  const EvaluationResult e = evaluate_regressor(val_set, network_regressor(r.final_checkpoint), c.geometry());
  EXPECT_EQ(e.estimates.size(), val_set.size());
  EXPECT_TRUE(std::isfinite(e.report.rmse_mps));
}
