// Mini-batch RMSprop training of the beam regressor.
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dvlfill/network.hpp"

namespace dvlfill {

struct TrainConfig {
  std::size_t epochs = 50;
  std::size_t batch_size = 32;
  double lr = 0.01;
  double rmsprop_decay = 0.99;
  double rmsprop_eps = 1e-8;
  std::uint64_t shuffle_seed = 0;
  std::uint64_t dropout_seed = 0;
  std::string loss = "mse";
  std::size_t threads = 1;
  /// Fixed gradient partition (independent of `threads`) reduced in order.
  bool deterministic = true;

  void validate() const;
};

/// cache <- rho * cache + (1 - rho) * g^2 ;  p <- p - lr * g / (sqrt(cache) + eps)
void rmsprop_step(std::span<double> params, std::span<const double> grads, std::span<double> cache,
                  const TrainConfig& config);

/// Fisher-Yates permutation of 0..n-1 driven by `rng`.
std::vector<std::size_t> permutation(std::size_t n, RandomState& rng);

struct EpochLoss {
  std::size_t epoch = 0;  ///< 1-based
  double train_loss = 0.0;
  std::optional<double> val_loss;
};

struct TrainResult {
  nn::ModelCheckpoint final_checkpoint;
  nn::ModelCheckpoint best_checkpoint;  ///< lowest validation loss (== final without validation data)
  std::vector<EpochLoss> history;
  std::size_t best_epoch = 0;
};

using EpochCallback = std::function<void(const EpochLoss&)>;

/// Trains `init` in place of a copy. Per-epoch train loss is the tuple-weighted
/// mean of the (dropout-active) batch losses; validation loss is measured in
/// inference mode. Throws TrainingDiverged on a non-finite batch loss.
TrainResult train(std::span<const TrainingTuple> train_set, std::span<const TrainingTuple> validation_set,
                  const TrainConfig& config, nn::ModelCheckpoint init, const EpochCallback& on_epoch = {});

/// Inference-mode MSE in normalized units.
double evaluate_loss(const nn::ModelCheckpoint& model, std::span<const TrainingTuple> tuples);

/// Batch gradient split into row chunks, evaluated on up to `threads` workers
/// and summed in chunk order.
nn::LossGradient parallel_loss_and_gradient(const nn::ModelCheckpoint& model, const nn::Batch& batch,
                                            const nn::Matrix* dropout_scale, std::size_t threads,
                                            bool deterministic);

}  // namespace dvlfill
