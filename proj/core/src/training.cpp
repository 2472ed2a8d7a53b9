#include "dvlfill/training.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include <fmt/format.h>

#include "dvlfill/errors.hpp"

namespace dvlfill {
namespace {

constexpr Eigen::Index kDeterministicChunk = 8;

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double batch_loss(const nn::ModelCheckpoint& model, const nn::Batch& all) {
  constexpr Eigen::Index kChunk = 256;
  double sum_sq = 0.0;
  for (Eigen::Index begin = 0; begin < all.rows(); begin += kChunk) {
    const Eigen::Index n = std::min(kChunk, all.rows() - begin);
    const nn::Batch b = nn::slice_rows(all, begin, n);
    const nn::Matrix out = nn::forward_batch(model, b);
    sum_sq += (out - b.target).squaredNorm();
  }
  return sum_sq / static_cast<double>(all.rows() * 2);
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs == 0) throw ConfigError("epochs must be positive");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (!(lr >= 0.0)) throw ConfigError(fmt::format("learning rate must be >= 0, got {}", lr));
  if (!(rmsprop_decay >= 0.0 && rmsprop_decay < 1.0)) {
    throw ConfigError(fmt::format("rmsprop_decay must lie in [0, 1), got {}", rmsprop_decay));
  }
  if (!(rmsprop_eps > 0.0)) throw ConfigError("rmsprop_eps must be positive");
  if (loss != "mse") throw ConfigError(fmt::format("unsupported loss '{}'", loss));
  if (threads == 0) throw ConfigError("threads must be positive");
}

void rmsprop_step(std::span<double> params, std::span<const double> grads, std::span<double> cache,
                  const TrainConfig& config) {
  if (params.size() != grads.size() || params.size() != cache.size()) {
    throw ContractViolation("rmsprop_step needs params, grads and cache of equal size");
  }
  const double rho = config.rmsprop_decay;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    cache[i] = rho * cache[i] + (1.0 - rho) * g * g;
    params[i] -= config.lr * g / (std::sqrt(cache[i]) + config.rmsprop_eps);
  }
}

std::vector<std::size_t> permutation(std::size_t n, RandomState& rng) {
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(p[i - 1], p[j]);
  }
  return p;
}

nn::LossGradient parallel_loss_and_gradient(const nn::ModelCheckpoint& model, const nn::Batch& batch,
                                            const nn::Matrix* dropout_scale, std::size_t threads,
                                            bool deterministic) {
  const Eigen::Index rows = batch.rows();
  if (rows == 0) throw ContractViolation("empty batch");
  const auto workers = static_cast<Eigen::Index>(std::max<std::size_t>(threads, 1));
  const Eigen::Index chunk = deterministic ? kDeterministicChunk : (rows + workers - 1) / workers;
  const Eigen::Index chunks = (rows + chunk - 1) / chunk;

  std::vector<nn::LossGradient> parts(static_cast<std::size_t>(chunks));
  const auto run_chunk = [&](Eigen::Index c) {
    const Eigen::Index begin = c * chunk;
    const Eigen::Index n = std::min(chunk, rows - begin);
    const nn::Batch sub = nn::slice_rows(batch, begin, n);
    const double weight = static_cast<double>(n) / static_cast<double>(rows);
    if (dropout_scale != nullptr) {
      const nn::Matrix mask = dropout_scale->middleRows(begin, n);
      parts[static_cast<std::size_t>(c)] = nn::loss_and_gradient(model, sub, &mask, weight);
    } else {
      parts[static_cast<std::size_t>(c)] = nn::loss_and_gradient(model, sub, nullptr, weight);
    }
  };

  if (workers == 1 || chunks == 1) {
    for (Eigen::Index c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::jthread> pool;
    for (Eigen::Index w = 0; w < std::min(workers, chunks); ++w) {
      pool.emplace_back([&, w] {
        for (Eigen::Index c = w; c < chunks; c += workers) run_chunk(c);
      });
    }
  }

  nn::LossGradient total = std::move(parts.front());
  for (std::size_t c = 1; c < parts.size(); ++c) {
    total.loss += parts[c].loss;
    for (std::size_t i = 0; i < total.grad.size(); ++i) total.grad[i] += parts[c].grad[i];
  }
  return total;
}

double evaluate_loss(const nn::ModelCheckpoint& model, std::span<const TrainingTuple> tuples) {
  if (tuples.empty()) throw ContractViolation("loss over an empty tuple set");
  return batch_loss(model, nn::make_batch(tuples, model.norm, model.config.window_len));
}

TrainResult train(std::span<const TrainingTuple> train_set, std::span<const TrainingTuple> validation_set,
                  const TrainConfig& config, nn::ModelCheckpoint init, const EpochCallback& on_epoch) {
  config.validate();
  if (train_set.empty()) throw ContractViolation("training needs at least one tuple");

  const std::size_t T = init.config.window_len;
  const nn::Batch all = nn::make_batch(train_set, init.norm, T);
  const nn::Batch val = validation_set.empty() ? nn::Batch{} : nn::make_batch(validation_set, init.norm, T);
  const std::size_t n = train_set.size();
  const double dropout = init.config.dropout;
  const auto fused = static_cast<Eigen::Index>(init.config.fused_features());

  TrainResult result;
  result.final_checkpoint = std::move(init);
  nn::ModelCheckpoint& model = result.final_checkpoint;
  std::vector<double> cache(model.params.size(), 0.0);
  RandomState shuffle_rng(config.shuffle_seed);
  RandomState dropout_rng(config.dropout_seed);

  std::optional<double> best_val;
  std::vector<double> best_params = model.params;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    const std::vector<std::size_t> order = permutation(n, shuffle_rng);
    double weighted = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t begin = 0; begin < n; begin += config.batch_size, ++batch_index) {
      const std::size_t count = std::min(config.batch_size, n - begin);
      const nn::Batch batch = nn::gather_rows(all, std::span(order).subspan(begin, count));
      nn::LossGradient lg;
      if (dropout > 0.0) {
        const nn::Matrix mask =
            nn::make_dropout_scale(static_cast<Eigen::Index>(count), fused, dropout, dropout_rng);
        lg = parallel_loss_and_gradient(model, batch, &mask, config.threads, config.deterministic);
      } else {
        lg = parallel_loss_and_gradient(model, batch, nullptr, config.threads, config.deterministic);
      }
      if (!std::isfinite(lg.loss)) {
        const double norm = l2_norm(model.params);
        throw TrainingDiverged(epoch, batch_index, norm,
                               fmt::format("non-finite loss at epoch {} batch {} (parameter norm {:g})", epoch,
                                           batch_index, norm));
      }
      weighted += lg.loss * static_cast<double>(count);
      rmsprop_step(model.params, lg.grad, cache, config);
    }

    EpochLoss record;
    record.epoch = epoch;
    record.train_loss = weighted / static_cast<double>(n);
    if (val.rows() > 0) {
      record.val_loss = batch_loss(model, val);
      if (!best_val || *record.val_loss < *best_val) {
        best_val = record.val_loss;
        best_params = model.params;
        result.best_epoch = epoch;
      }
    }
    result.history.push_back(record);
    if (on_epoch) on_epoch(record);
  }

  model.meta.epochs_trained += config.epochs;
  model.meta.selection = "final";
  model.meta.selected_epoch = config.epochs;
  model.meta.validation_loss =
      result.history.empty() ? std::nullopt : result.history.back().val_loss;

  result.best_checkpoint = model;
  if (best_val) {
    result.best_checkpoint.params = std::move(best_params);
    result.best_checkpoint.meta.selection = "best_validation";
    result.best_checkpoint.meta.selected_epoch = result.best_epoch;
    result.best_checkpoint.meta.validation_loss = best_val;
  } else {
    result.best_epoch = config.epochs;
  }
  return result;
}

}  // namespace dvlfill
