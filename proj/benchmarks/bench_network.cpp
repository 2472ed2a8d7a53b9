#include <benchmark/benchmark.h>

#include "dvlfill/dataset.hpp"
#include "dvlfill/network.hpp"
#include "dvlfill/trajectory.hpp"

using namespace dvlfill;

namespace {

std::vector<TrainingTuple> sample_tuples(std::size_t n) {
  const SimulatedRun run =
      simulate(static_cast<double>(n) + 2.0, TrajectoryProfile{}, BeamGeometry(), DvlErrorParams{}, 3);
  auto tuples = assemble_tuples(run.imu, run.dvl, run.truth, BeamMask::with_missing({2, 4})).tuples;
  tuples.resize(n);
  return tuples;
}

}  // namespace

static void BM_ForwardBatch(benchmark::State& state) {
  const auto tuples = sample_tuples(static_cast<std::size_t>(state.range(0)));
  const nn::NetworkConfig cfg;
  const nn::ModelCheckpoint model = nn::init_checkpoint(cfg, nn::compute_norm_stats(tuples), 4);
  const nn::Batch batch = nn::make_batch(tuples, model.norm, cfg.window_len);
  for (auto _ : state) benchmark::DoNotOptimize(nn::forward_batch(model, batch));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardBatch)->Arg(1)->Arg(32);

static void BM_LossAndGradient(benchmark::State& state) {
  const auto tuples = sample_tuples(static_cast<std::size_t>(state.range(0)));
  const nn::NetworkConfig cfg;
  const nn::ModelCheckpoint model = nn::init_checkpoint(cfg, nn::compute_norm_stats(tuples), 4);
  const nn::Batch batch = nn::make_batch(tuples, model.norm, cfg.window_len);
  for (auto _ : state) benchmark::DoNotOptimize(nn::loss_and_gradient(model, batch));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LossAndGradient)->Arg(32);

static void BM_PredictSingle(benchmark::State& state) {
  const auto tuples = sample_tuples(1);
  const nn::NetworkConfig cfg;
  const nn::ModelCheckpoint model = nn::init_checkpoint(cfg, nn::compute_norm_stats(tuples), 4);
  for (auto _ : state)
    benchmark::DoNotOptimize(nn::predict(tuples[0].window, tuples[0].partial_beams_mps, model));
}
BENCHMARK(BM_PredictSingle);
