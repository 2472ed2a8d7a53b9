#include "dvlfill/pipeline.hpp"

#include <fmt/format.h>

#include "dvlfill/csv.hpp"
#include "dvlfill/errors.hpp"
#include "dvlfill/random.hpp"
#include "dvlfill/solver.hpp"

namespace dvlfill {

SimulatedRun simulate_training_run(const RunConfig& config) {
  const auto& sim = config.simulation;
  return simulate(sim.duration_s, sim.profile, config.geometry(), config.error_model, sim.seed);
}

SimulatedRun simulate_test_run(const RunConfig& config) {
  const auto& sim = config.simulation;
  DvlErrorParams errors = config.error_model;
  errors.seed = derive_seed(config.error_model.seed, "test");
  return simulate(sim.test_duration_s, sim.profile, config.geometry(), errors, sim.test_seed);
}

LoadedData load_dataset(const DataPaths& paths, const RunConfig& config) {
  if (paths.imu_csv.empty() || paths.dvl_csv.empty()) {
    throw ConfigError("dataset needs both imu_csv and dvl_csv");
  }
  LoadedData data;
  data.imu = read_imu_csv(paths.imu_csv);
  data.dvl = read_dvl_csv(paths.dvl_csv);
  const BeamGeometry geometry = config.geometry();

  if (!paths.truth_csv.empty()) {
    data.truth = read_truth_csv(paths.truth_csv);
  } else {
    data.truth = truth_from_beams(data.dvl, geometry);
  }

  if (paths.apply_error_model) {
    const DvlErrorParams& p = config.error_model;
    p.validate();
    RandomState rng(p.seed);
    for (DvlSample& s : data.dvl) {
      for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(kNumBeams); ++i) {
        const double noise = rng.gaussian();
        s.beams_mps(i) = (1.0 + p.scale(i)) * s.beams_mps(i) + p.bias_mps(i) + p.noise_std_mps * noise;
      }
    }
  }
  return data;
}

TupleSet build_tuples(const LoadedData& data, const RunConfig& config) {
  return assemble_tuples(data.imu, data.dvl, data.truth, config.available_mask(), config.assemble);
}

TrainResult train_model(const RunConfig& config, std::span<const TrainingTuple> train_set,
                        std::span<const TrainingTuple> validation_set, const EpochCallback& on_epoch) {
  nn::ModelCheckpoint init = nn::init_checkpoint(config.network, nn::compute_norm_stats(train_set), config.network_seed);
  init.meta.config_hash = config.hash();
  init.meta.missing_beams = config.missing_beams;
  init.meta.pitch_deg = config.pitch_deg;
  return train(train_set, validation_set, config.training, std::move(init), on_epoch);
}

BatchRegressor network_regressor(const nn::ModelCheckpoint& model) {
  return [model](std::span<const TrainingTuple> tuples) {
    const nn::Matrix out = nn::predict_tuples(tuples, model);
    std::vector<Vec2> result(tuples.size());
    for (std::size_t r = 0; r < tuples.size(); ++r) {
      result[r] = Vec2(out(static_cast<Eigen::Index>(r), 0), out(static_cast<Eigen::Index>(r), 1));
    }
    return result;
  };
}

BatchRegressor mean_beam_regressor(const nn::NormStats& norm) {
  norm.validate();
  const Vec2 mean(norm.target_beams.mean[0], norm.target_beams.mean[1]);
  return [mean](std::span<const TrainingTuple> tuples) { return std::vector<Vec2>(tuples.size(), mean); };
}

BatchRegressor oracle_regressor() {
  return per_tuple([](const TrainingTuple& t) { return t.target_beams_mps; });
}

BatchRegressor per_tuple(BeamRegressor regressor) {
  return [regressor = std::move(regressor)](std::span<const TrainingTuple> tuples) {
    std::vector<Vec2> result;
    result.reserve(tuples.size());
    for (const TrainingTuple& t : tuples) result.push_back(regressor(t));
    return result;
  };
}

EvaluationResult evaluate_regressor(std::span<const TrainingTuple> tuples, const BatchRegressor& regressor,
                                    const BeamGeometry& geometry) {
  const std::vector<Vec2> regressed = regressor(tuples);
  if (regressed.size() != tuples.size()) {
    throw ContractViolation(
        fmt::format("regressor returned {} rows for {} tuples", regressed.size(), tuples.size()));
  }
  EvaluationResult result;
  result.estimates.reserve(tuples.size());
  result.truth_speed.reserve(tuples.size());
  for (std::size_t i = 0; i < tuples.size(); ++i) {
    const TrainingTuple& t = tuples[i];
    result.estimates.push_back(solve_with_regressed(t.partial_beams_mps, regressed[i], t.mask, geometry.h()));
    result.truth_speed.push_back(t.v_true_mps.norm());
  }
  result.predicted_speed = speed_series(result.estimates);
  result.report = evaluate(result.truth_speed, result.predicted_speed);
  return result;
}

}  // namespace dvlfill
