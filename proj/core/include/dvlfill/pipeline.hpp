// End-to-end flow: data ingestion, beam regression, velocity solve, scoring.
#pragma once

#include <functional>
#include <span>
#include <vector>

#include "dvlfill/config.hpp"
#include "dvlfill/dataset.hpp"
#include "dvlfill/metrics.hpp"
#include "dvlfill/network.hpp"
#include "dvlfill/training.hpp"
#include "dvlfill/trajectory.hpp"

namespace dvlfill {

struct LoadedData {
  ImuSeries imu;
  DvlSeries dvl;  ///< unit-under-test beams
  TruthSeries truth;
};

/// Synthetic training run described by `config.simulation`.
SimulatedRun simulate_training_run(const RunConfig& config);
/// Held-out run: its own trajectory seed and DVL noise stream. Empty when
/// test_duration_s is zero.
SimulatedRun simulate_test_run(const RunConfig& config);

/// Reads the CSVs named in `paths`. With apply_error_model the DVL file is
/// taken as clean and corrupted with `config.error_model`; ground truth comes
/// from the truth CSV when given, otherwise from a 4-beam solve of the clean beams.
LoadedData load_dataset(const DataPaths& paths, const RunConfig& config);

TupleSet build_tuples(const LoadedData& data, const RunConfig& config);

/// Normalization from `train_set`, seeded initialisation, then training.
/// Both returned checkpoints carry the config hash, mask and pitch.
TrainResult train_model(const RunConfig& config, std::span<const TrainingTuple> train_set,
                        std::span<const TrainingTuple> validation_set, const EpochCallback& on_epoch = {});

/// Maps a tuple to the two regressed (missing) beams in m/s.
using BeamRegressor = std::function<Vec2(const TrainingTuple&)>;

/// Batch regressor; default implementation loops a BeamRegressor.
using BatchRegressor = std::function<std::vector<Vec2>(std::span<const TrainingTuple>)>;

BatchRegressor network_regressor(const nn::ModelCheckpoint& model);
/// Predicts the training-split mean of each missing beam.
BatchRegressor mean_beam_regressor(const nn::NormStats& norm);
/// Echoes the target beams; an upper bound used to test the plumbing.
BatchRegressor oracle_regressor();
BatchRegressor per_tuple(BeamRegressor regressor);

struct EvaluationResult {
  MetricsReport report;
  std::vector<double> truth_speed;
  std::vector<double> predicted_speed;
  std::vector<VelocityEstimate> estimates;
};

EvaluationResult evaluate_regressor(std::span<const TrainingTuple> tuples, const BatchRegressor& regressor,
                                    const BeamGeometry& geometry);

}  // namespace dvlfill
