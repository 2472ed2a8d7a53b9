// Two-head 1-D convolutional regressor for the missing beam pair.
//
// Topology (defaults in parentheses):
//   accel window (3 x T) -> conv1d(3 -> F, K) -> act -> flatten
//   gyro  window (3 x T) -> conv1d(3 -> F, K) -> act -> flatten
//     -> concat -> dropout -> dense(H0) -> act
//     -> ... -> dense(H_last) -> act -> concat(partial beams) -> dense(2), linear
//
// All inputs are z-scored with the checkpoint's normalization statistics and
// the output is mapped back to m/s with the target-beam statistics.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "dvlfill/dataset.hpp"
#include "dvlfill/random.hpp"

namespace dvlfill::nn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Activation { linear, relu, tanh };

std::string_view to_string(Activation a);
Activation activation_from_string(std::string_view name);

/// Dense row-major array with an explicit shape.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> values;

  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> dims);
  Tensor(std::vector<std::size_t> dims, std::vector<double> data);

  std::size_t size() const { return values.size(); }
};

/// Valid (unpadded) cross-correlation: out[o][t] = bias[o] + sum_{c,k} w[o][c][k] * in[c][t + k].
/// Shapes: input C_in x T, kernels C_out x C_in x K, bias C_out. Throws
/// ContractViolation on a shape mismatch or T < K.
Tensor conv1d_forward(const Tensor& input, const Tensor& kernels, const Tensor& bias);

struct NetworkConfig {
  std::size_t window_len = 100;
  std::size_t conv_filters = 6;
  std::size_t kernel_size = 2;
  Activation conv_activation = Activation::relu;
  std::vector<std::size_t> hidden = {512, 64};
  Activation hidden_activation = Activation::relu;
  double dropout = 0.2;

  std::size_t conv_length() const { return window_len - kernel_size + 1; }
  std::size_t head_features() const { return conv_filters * conv_length(); }
  std::size_t fused_features() const { return 2 * head_features(); }

  void validate() const;
  /// Hash over every topology field; changes whenever the layer stack changes.
  std::uint64_t topology_hash() const;
};

inline constexpr std::size_t kImuChannels = 3;
inline constexpr std::size_t kBeamPair = 2;

struct ChannelStats {
  std::vector<double> mean;
  std::vector<double> std;
};

struct NormStats {
  ChannelStats accel;          // 3 channels
  ChannelStats gyro;           // 3 channels
  ChannelStats partial_beams;  // 2 channels
  ChannelStats target_beams;   // 2 channels

  /// Throws ContractViolation on missing channels or non-positive std.
  void validate() const;
};

/// Per-channel z-score statistics over a training split. Channels with zero
/// spread get std = 1.
NormStats compute_norm_stats(std::span<const TrainingTuple> tuples);

/// Identity statistics (mean 0, std 1) for every channel.
NormStats identity_stats();

struct ParamSlot {
  std::string name;
  std::vector<std::size_t> shape;
  std::size_t offset = 0;
  std::size_t size = 0;
};

/// Parameter tensors in storage order: accel_conv.{weight,bias},
/// gyro_conv.{weight,bias}, dense<i>.{weight,bias}..., output.{weight,bias}.
/// Dense weights are [out, in], conv weights [F, 3, K].
std::vector<ParamSlot> parameter_layout(const NetworkConfig& config);
std::size_t parameter_count(const NetworkConfig& config);

struct CheckpointMeta {
  std::uint64_t seed = 0;
  std::size_t epochs_trained = 0;
  std::string config_hash;
  std::vector<int> missing_beams = {2, 4};
  double pitch_deg = 20.0;
  std::string selection = "final";  ///< "final" or "best_validation"
  std::size_t selected_epoch = 0;
  std::optional<double> validation_loss;
};

struct ModelCheckpoint {
  NetworkConfig config;
  std::vector<double> params;
  NormStats norm;
  CheckpointMeta meta;

  std::size_t parameter_count() const { return params.size(); }
};

/// Uniform fan-in initialisation, +-sqrt(1 / fan_in), for weights and biases.
ModelCheckpoint init_checkpoint(const NetworkConfig& config, const NormStats& norm, std::uint64_t seed);

/// Normalized network inputs, one row per sample. IMU rows are channel-major
/// (row[c * T + t]).
struct Batch {
  Matrix accel;
  Matrix gyro;
  Matrix partial;
  Matrix target;  ///< may be empty for inference

  Eigen::Index rows() const { return partial.rows(); }
};

Batch make_batch(std::span<const TrainingTuple> tuples, const NormStats& norm, std::size_t window_len);
Batch gather_rows(const Batch& source, std::span<const std::size_t> rows);
Batch slice_rows(const Batch& source, Eigen::Index begin, Eigen::Index count);

/// Inverted-dropout multipliers: 0 with probability p, else 1 / (1 - p).
/// Drawn row-major from `rng`.
Matrix make_dropout_scale(Eigen::Index rows, Eigen::Index cols, double p, RandomState& rng);

/// Activations cached by a forward pass for backpropagation.
struct ForwardTape {
  Matrix accel_pre;  ///< conv outputs before activation
  Matrix gyro_pre;
  Matrix fused;      ///< dense0 input (after activation and dropout)
  Matrix dropout_scale;
  std::vector<Matrix> hidden_pre;
  std::vector<Matrix> hidden_act;
  Matrix output;     ///< normalized predictions, B x 2
};

/// Normalized predictions for every row. `dropout_scale`, when non-null, must
/// be B x fused_features and is applied to the fused features.
Matrix forward_batch(const ModelCheckpoint& model, const Batch& batch, const Matrix* dropout_scale = nullptr,
                     ForwardTape* tape = nullptr);

/// loss_scale * mean((output - target)^2) over rows and both beams.
double mse_loss(const Matrix& output, const Matrix& target, double loss_scale = 1.0);

/// Exact gradient of mse_loss(tape.output, batch.target, loss_scale) with
/// respect to every parameter, in parameter_layout order.
std::vector<double> backward(const ModelCheckpoint& model, const Batch& batch, const ForwardTape& tape,
                             double loss_scale = 1.0);

struct LossGradient {
  double loss = 0.0;
  std::vector<double> grad;
};

LossGradient loss_and_gradient(const ModelCheckpoint& model, const Batch& batch, const Matrix* dropout_scale = nullptr,
                               double loss_scale = 1.0);

/// Single-window regression in m/s. With `training` set, dropout masks are
/// drawn from `rng`; otherwise `rng` is untouched.
Vec2 forward(const ImuWindow& window, const Vec2& partial_beams, const ModelCheckpoint& model, bool training,
             RandomState& rng);

/// Inference-mode forward.
Vec2 predict(const ImuWindow& window, const Vec2& partial_beams, const ModelCheckpoint& model);

/// Inference over many tuples, batched. Returns B x 2 in m/s.
Matrix predict_tuples(std::span<const TrainingTuple> tuples, const ModelCheckpoint& model);

}  // namespace dvlfill::nn
