#include "dvlfill/network.hpp"

#include <cmath>
#include <functional>
#include <numeric>

#include <fmt/format.h>

#include "dvlfill/errors.hpp"

namespace dvlfill::nn {
namespace {

using ConstMap = Eigen::Map<const Matrix>;
using ConstRowMap = Eigen::Map<const Eigen::RowVectorXd>;
using MutMap = Eigen::Map<Matrix>;
using MutRowMap = Eigen::Map<Eigen::RowVectorXd>;

// Valid cross-correlation of one C x T signal with F x C x K kernels.
void conv_valid(const double* in, std::size_t channels, std::size_t length, const double* kernels, const double* bias,
                std::size_t filters, std::size_t kernel, double* out) {
  const std::size_t out_len = length - kernel + 1;
  for (std::size_t f = 0; f < filters; ++f) {
    double* dst = out + f * out_len;
    for (std::size_t t = 0; t < out_len; ++t) dst[t] = bias[f];
    for (std::size_t c = 0; c < channels; ++c) {
      const double* src = in + c * length;
      const double* w = kernels + (f * channels + c) * kernel;
      for (std::size_t k = 0; k < kernel; ++k) {
        const double wk = w[k];
        for (std::size_t t = 0; t < out_len; ++t) dst[t] += wk * src[t + k];
      }
    }
  }
}

void activate(Activation a, const Matrix& pre, Matrix& out) {
  switch (a) {
    case Activation::linear:
      out = pre;
      break;
    case Activation::relu:
      out = pre.cwiseMax(0.0);
      break;
    case Activation::tanh:
      out = pre.array().tanh().matrix();
      break;
  }
}

// d act / d pre, multiplied into `grad` in place.
void activation_backward(Activation a, const Matrix& pre, Matrix& grad) {
  switch (a) {
    case Activation::linear:
      break;
    case Activation::relu:
      grad = (pre.array() > 0.0).select(grad, 0.0);
      break;
    case Activation::tanh:
      grad.array() *= 1.0 - pre.array().tanh().square();
      break;
  }
}

// Offsets of each parameter tensor, resolved once per call site.
struct Views {
  std::vector<ParamSlot> slots;
  std::size_t dense_layers = 0;

  explicit Views(const NetworkConfig& config) : slots(parameter_layout(config)), dense_layers(config.hidden.size()) {}

  const ParamSlot& accel_w() const { return slots[0]; }
  const ParamSlot& accel_b() const { return slots[1]; }
  const ParamSlot& gyro_w() const { return slots[2]; }
  const ParamSlot& gyro_b() const { return slots[3]; }
  const ParamSlot& dense_w(std::size_t l) const { return slots[4 + 2 * l]; }
  const ParamSlot& dense_b(std::size_t l) const { return slots[5 + 2 * l]; }
  const ParamSlot& out_w() const { return slots[4 + 2 * dense_layers]; }
  const ParamSlot& out_b() const { return slots[5 + 2 * dense_layers]; }
};

ConstMap weight(const std::vector<double>& p, const ParamSlot& s) {
  return ConstMap(p.data() + s.offset, static_cast<Eigen::Index>(s.shape[0]), static_cast<Eigen::Index>(s.shape[1]));
}

ConstRowMap bias(const std::vector<double>& p, const ParamSlot& s) {
  return ConstRowMap(p.data() + s.offset, static_cast<Eigen::Index>(s.size));
}

void conv_head(const Matrix& x, const std::vector<double>& p, const ParamSlot& w, const ParamSlot& b,
               const NetworkConfig& cfg, Matrix& pre) {
  pre.resize(x.rows(), static_cast<Eigen::Index>(cfg.head_features()));
  for (Eigen::Index s = 0; s < x.rows(); ++s) {
    conv_valid(x.row(s).data(), kImuChannels, cfg.window_len, p.data() + w.offset, p.data() + b.offset,
               cfg.conv_filters, cfg.kernel_size, pre.row(s).data());
  }
}

void conv_head_backward(const Matrix& x, const Matrix& dpre, const NetworkConfig& cfg, double* gw, double* gb) {
  const std::size_t T = cfg.window_len;
  const std::size_t L = cfg.conv_length();
  const std::size_t K = cfg.kernel_size;
  for (Eigen::Index s = 0; s < x.rows(); ++s) {
    const double* in = x.row(s).data();
    const double* d = dpre.row(s).data();
    for (std::size_t f = 0; f < cfg.conv_filters; ++f) {
      const double* df = d + f * L;
      double db = 0.0;
      for (std::size_t t = 0; t < L; ++t) db += df[t];
      gb[f] += db;
      for (std::size_t c = 0; c < kImuChannels; ++c) {
        const double* src = in + c * T;
        for (std::size_t k = 0; k < K; ++k) {
          double acc = 0.0;
          for (std::size_t t = 0; t < L; ++t) acc += df[t] * src[t + k];
          gw[(f * kImuChannels + c) * K + k] += acc;
        }
      }
    }
  }
}

void normalize_window(const ImuWindow& w, const NormStats& norm, std::size_t T, double* accel_row, double* gyro_row) {
  if (static_cast<std::size_t>(w.length()) != T) {
    throw ContractViolation(fmt::format("IMU window has {} rows, network expects {}", w.length(), T));
  }
  for (std::size_t c = 0; c < kImuChannels; ++c) {
    const auto ci = static_cast<Eigen::Index>(c);
    for (std::size_t t = 0; t < T; ++t) {
      const auto ti = static_cast<Eigen::Index>(t);
      accel_row[c * T + t] = (w.accel_mps2(ti, ci) - norm.accel.mean[c]) / norm.accel.std[c];
      gyro_row[c * T + t] = (w.gyro_radps(ti, ci) - norm.gyro.mean[c]) / norm.gyro.std[c];
    }
  }
}

ChannelStats channel_stats(std::size_t channels, const std::function<void(std::vector<double>&, std::vector<double>&,
                                                                               double&)>& accumulate) {
  std::vector<double> sum(channels, 0.0);
  std::vector<double> sum_sq(channels, 0.0);
  double count = 0.0;
  accumulate(sum, sum_sq, count);
  ChannelStats st;
  st.mean.resize(channels);
  st.std.resize(channels);
  for (std::size_t c = 0; c < channels; ++c) {
    const double mean = count > 0.0 ? sum[c] / count : 0.0;
    const double var = count > 0.0 ? std::max(0.0, sum_sq[c] / count - mean * mean) : 0.0;
    st.mean[c] = mean;
    st.std[c] = var > 1e-24 ? std::sqrt(var) : 1.0;
  }
  return st;
}

}  // namespace

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::linear:
      return "linear";
    case Activation::relu:
      return "relu";
    case Activation::tanh:
      return "tanh";
  }
  return "linear";
}

Activation activation_from_string(std::string_view name) {
  if (name == "linear") return Activation::linear;
  if (name == "relu") return Activation::relu;
  if (name == "tanh") return Activation::tanh;
  throw ConfigError(fmt::format("unknown activation '{}'", name));
}

Tensor::Tensor(std::vector<std::size_t> dims) : shape(std::move(dims)) {
  const std::size_t n = std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
  values.assign(n, 0.0);
}

Tensor::Tensor(std::vector<std::size_t> dims, std::vector<double> data) : shape(std::move(dims)), values(std::move(data)) {
  const std::size_t n = std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
  if (n != values.size()) {
    throw ContractViolation(fmt::format("tensor shape holds {} values but {} were given", n, values.size()));
  }
}

Tensor conv1d_forward(const Tensor& input, const Tensor& kernels, const Tensor& bias) {
  if (input.shape.size() != 2 || kernels.shape.size() != 3 || bias.shape.size() != 1) {
    throw ContractViolation("conv1d expects input C_in x T, kernels C_out x C_in x K, bias C_out");
  }
  const std::size_t c_in = input.shape[0];
  const std::size_t length = input.shape[1];
  const std::size_t c_out = kernels.shape[0];
  const std::size_t k = kernels.shape[2];
  if (kernels.shape[1] != c_in || bias.shape[0] != c_out) {
    throw ContractViolation("conv1d kernel/bias shapes do not match the input channels");
  }
  if (k == 0 || length < k) throw ContractViolation(fmt::format("conv1d needs T >= K (T={}, K={})", length, k));
  Tensor out({c_out, length - k + 1});
  conv_valid(input.values.data(), c_in, length, kernels.values.data(), bias.values.data(), c_out, k,
             out.values.data());
  return out;
}

void NetworkConfig::validate() const {
  if (kernel_size == 0 || window_len < kernel_size) {
    throw ConfigError(fmt::format("window_len {} must be >= kernel_size {} > 0", window_len, kernel_size));
  }
  if (conv_filters == 0) throw ConfigError("conv_filters must be positive");
  if (hidden.empty()) throw ConfigError("at least one hidden dense layer is required");
  for (std::size_t h : hidden) {
    if (h == 0) throw ConfigError("hidden layer widths must be positive");
  }
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError(fmt::format("dropout {} outside [0, 1)", dropout));
}

std::uint64_t NetworkConfig::topology_hash() const {
  const std::string desc =
      fmt::format("T={};F={};K={};conv={};hidden={};act={};dropout={}", window_len, conv_filters, kernel_size,
                  to_string(conv_activation), fmt::join(hidden, ","), to_string(hidden_activation), dropout);
  return fnv1a64(desc);
}

void NormStats::validate() const {
  const auto check = [](const ChannelStats& s, std::size_t n, std::string_view name) {
    if (s.mean.size() != n || s.std.size() != n) {
      throw ContractViolation(fmt::format("normalization stats for {} need {} channels", name, n));
    }
    for (double v : s.std) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw ContractViolation(fmt::format("normalization std for {} must be positive", name));
      }
    }
  };
  check(accel, kImuChannels, "accel");
  check(gyro, kImuChannels, "gyro");
  check(partial_beams, kBeamPair, "partial_beams");
  check(target_beams, kBeamPair, "target_beams");
}

NormStats compute_norm_stats(std::span<const TrainingTuple> tuples) {
  NormStats ns;
  const auto window_stats = [&](bool use_accel) {
    return channel_stats(kImuChannels, [&](auto& sum, auto& sq, double& n) {
      for (const auto& tup : tuples) {
        const WindowMatrix& m = use_accel ? tup.window.accel_mps2 : tup.window.gyro_radps;
        for (std::size_t c = 0; c < kImuChannels; ++c) {
          sum[c] += m.col(static_cast<Eigen::Index>(c)).sum();
          sq[c] += m.col(static_cast<Eigen::Index>(c)).squaredNorm();
        }
        n += static_cast<double>(m.rows());
      }
    });
  };
  const auto beam_stats = [&](bool partial) {
    return channel_stats(kBeamPair, [&](auto& sum, auto& sq, double& n) {
      for (const auto& tup : tuples) {
        const Vec2& b = partial ? tup.partial_beams_mps : tup.target_beams_mps;
        for (std::size_t c = 0; c < kBeamPair; ++c) {
          sum[c] += b(static_cast<Eigen::Index>(c));
          sq[c] += b(static_cast<Eigen::Index>(c)) * b(static_cast<Eigen::Index>(c));
        }
        n += 1.0;
      }
    });
  };
  ns.accel = window_stats(true);
  ns.gyro = window_stats(false);
  ns.partial_beams = beam_stats(true);
  ns.target_beams = beam_stats(false);
  return ns;
}

NormStats identity_stats() {
  NormStats ns;
  ns.accel = {std::vector<double>(kImuChannels, 0.0), std::vector<double>(kImuChannels, 1.0)};
  ns.gyro = ns.accel;
  ns.partial_beams = {std::vector<double>(kBeamPair, 0.0), std::vector<double>(kBeamPair, 1.0)};
  ns.target_beams = ns.partial_beams;
  return ns;
}

std::vector<ParamSlot> parameter_layout(const NetworkConfig& config) {
  std::vector<ParamSlot> slots;
  std::size_t offset = 0;
  const auto add = [&](std::string name, std::vector<std::size_t> shape) {
    const std::size_t n = std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
    slots.push_back(ParamSlot{std::move(name), std::move(shape), offset, n});
    offset += n;
  };
  add("accel_conv.weight", {config.conv_filters, kImuChannels, config.kernel_size});
  add("accel_conv.bias", {config.conv_filters});
  add("gyro_conv.weight", {config.conv_filters, kImuChannels, config.kernel_size});
  add("gyro_conv.bias", {config.conv_filters});
  std::size_t fan_in = config.fused_features();
  for (std::size_t l = 0; l < config.hidden.size(); ++l) {
    add(fmt::format("dense{}.weight", l), {config.hidden[l], fan_in});
    add(fmt::format("dense{}.bias", l), {config.hidden[l]});
    fan_in = config.hidden[l];
  }
  add("output.weight", {kBeamPair, fan_in + kBeamPair});
  add("output.bias", {kBeamPair});
  return slots;
}

std::size_t parameter_count(const NetworkConfig& config) {
  const auto slots = parameter_layout(config);
  return slots.back().offset + slots.back().size;
}

ModelCheckpoint init_checkpoint(const NetworkConfig& config, const NormStats& norm, std::uint64_t seed) {
  config.validate();
  norm.validate();
  ModelCheckpoint model;
  model.config = config;
  model.norm = norm;
  model.meta.seed = seed;
  model.params.resize(parameter_count(config));

  RandomState rng(seed);
  const auto slots = parameter_layout(config);
  for (std::size_t i = 0; i < slots.size(); i += 2) {
    const ParamSlot& w = slots[i];
    const ParamSlot& b = slots[i + 1];
    const std::size_t fan_in = w.size / w.shape[0];
    const double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
    for (std::size_t k = 0; k < w.size; ++k) model.params[w.offset + k] = rng.uniform(-bound, bound);
    for (std::size_t k = 0; k < b.size; ++k) model.params[b.offset + k] = rng.uniform(-bound, bound);
  }
  return model;
}

Batch make_batch(std::span<const TrainingTuple> tuples, const NormStats& norm, std::size_t window_len) {
  norm.validate();
  const auto rows = static_cast<Eigen::Index>(tuples.size());
  const auto width = static_cast<Eigen::Index>(kImuChannels * window_len);
  Batch b;
  b.accel.resize(rows, width);
  b.gyro.resize(rows, width);
  b.partial.resize(rows, 2);
  b.target.resize(rows, 2);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const TrainingTuple& tup = tuples[static_cast<std::size_t>(r)];
    normalize_window(tup.window, norm, window_len, b.accel.row(r).data(), b.gyro.row(r).data());
    for (Eigen::Index c = 0; c < 2; ++c) {
      const auto cu = static_cast<std::size_t>(c);
      b.partial(r, c) = (tup.partial_beams_mps(c) - norm.partial_beams.mean[cu]) / norm.partial_beams.std[cu];
      b.target(r, c) = (tup.target_beams_mps(c) - norm.target_beams.mean[cu]) / norm.target_beams.std[cu];
    }
  }
  return b;
}

Batch gather_rows(const Batch& source, std::span<const std::size_t> rows) {
  Batch b;
  const auto n = static_cast<Eigen::Index>(rows.size());
  b.accel.resize(n, source.accel.cols());
  b.gyro.resize(n, source.gyro.cols());
  b.partial.resize(n, source.partial.cols());
  b.target.resize(source.target.rows() > 0 ? n : 0, source.target.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto r = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(i)]);
    b.accel.row(i) = source.accel.row(r);
    b.gyro.row(i) = source.gyro.row(r);
    b.partial.row(i) = source.partial.row(r);
    if (b.target.rows() > 0) b.target.row(i) = source.target.row(r);
  }
  return b;
}

Batch slice_rows(const Batch& source, Eigen::Index begin, Eigen::Index count) {
  Batch b;
  b.accel = source.accel.middleRows(begin, count);
  b.gyro = source.gyro.middleRows(begin, count);
  b.partial = source.partial.middleRows(begin, count);
  if (source.target.rows() > 0) b.target = source.target.middleRows(begin, count);
  return b;
}

Matrix make_dropout_scale(Eigen::Index rows, Eigen::Index cols, double p, RandomState& rng) {
  Matrix scale(rows, cols);
  const double keep = 1.0 / (1.0 - p);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) scale(r, c) = rng.uniform() < p ? 0.0 : keep;
  }
  return scale;
}

Matrix forward_batch(const ModelCheckpoint& model, const Batch& batch, const Matrix* dropout_scale,
                     ForwardTape* tape) {
  const NetworkConfig& cfg = model.config;
  const Views v(cfg);
  const auto& p = model.params;
  if (p.size() != parameter_count(cfg)) {
    throw ContractViolation(fmt::format("checkpoint holds {} parameters, topology needs {}", p.size(),
                                        parameter_count(cfg)));
  }
  const Eigen::Index rows = batch.rows();
  const auto head = static_cast<Eigen::Index>(cfg.head_features());
  if (batch.accel.cols() != static_cast<Eigen::Index>(kImuChannels * cfg.window_len)) {
    throw ContractViolation("batch window length does not match the network");
  }

  ForwardTape local;
  ForwardTape& t = tape != nullptr ? *tape : local;

  conv_head(batch.accel, p, v.accel_w(), v.accel_b(), cfg, t.accel_pre);
  conv_head(batch.gyro, p, v.gyro_w(), v.gyro_b(), cfg, t.gyro_pre);

  t.fused.resize(rows, 2 * head);
  {
    Matrix act;
    activate(cfg.conv_activation, t.accel_pre, act);
    t.fused.leftCols(head) = act;
    activate(cfg.conv_activation, t.gyro_pre, act);
    t.fused.rightCols(head) = act;
  }
  if (dropout_scale != nullptr) {
    if (dropout_scale->rows() != rows || dropout_scale->cols() != 2 * head) {
      throw ContractViolation("dropout mask shape does not match the fused features");
    }
    t.fused.array() *= dropout_scale->array();
    t.dropout_scale = *dropout_scale;
  } else {
    t.dropout_scale.resize(0, 0);
  }

  const std::size_t layers = cfg.hidden.size();
  t.hidden_pre.resize(layers);
  t.hidden_act.resize(layers);
  const Matrix* input = &t.fused;
  for (std::size_t l = 0; l < layers; ++l) {
    Matrix& z = t.hidden_pre[l];
    z.noalias() = *input * weight(p, v.dense_w(l)).transpose();
    z.rowwise() += bias(p, v.dense_b(l));
    activate(cfg.hidden_activation, z, t.hidden_act[l]);
    input = &t.hidden_act[l];
  }

  const Eigen::Index last = input->cols();
  const ConstMap w_out = weight(p, v.out_w());
  t.output.noalias() = *input * w_out.leftCols(last).transpose();
  t.output.noalias() += batch.partial * w_out.rightCols(kBeamPair).transpose();
  t.output.rowwise() += bias(p, v.out_b());
  return t.output;
}

double mse_loss(const Matrix& output, const Matrix& target, double loss_scale) {
  if (output.rows() != target.rows() || output.cols() != target.cols()) {
    throw ContractViolation("loss needs predictions and targets of the same shape");
  }
  return loss_scale * (output - target).squaredNorm() / static_cast<double>(output.size());
}

std::vector<double> backward(const ModelCheckpoint& model, const Batch& batch, const ForwardTape& tape,
                             double loss_scale) {
  const NetworkConfig& cfg = model.config;
  const Views v(cfg);
  const auto& p = model.params;
  std::vector<double> grad(p.size(), 0.0);
  if (batch.target.rows() != batch.rows()) throw ContractViolation("backward needs target beams");

  const auto grad_matrix = [&](const ParamSlot& s) {
    return MutMap(grad.data() + s.offset, static_cast<Eigen::Index>(s.shape[0]),
                  static_cast<Eigen::Index>(s.shape[1]));
  };
  const auto grad_bias = [&](const ParamSlot& s) {
    return MutRowMap(grad.data() + s.offset, static_cast<Eigen::Index>(s.size));
  };

  const std::size_t layers = cfg.hidden.size();
  const Matrix d_out = (tape.output - batch.target) * (2.0 * loss_scale / static_cast<double>(tape.output.size()));

  const Matrix& last_act = tape.hidden_act[layers - 1];
  const Eigen::Index last = last_act.cols();
  {
    MutMap gw = grad_matrix(v.out_w());
    gw.leftCols(last).noalias() = d_out.transpose() * last_act;
    gw.rightCols(kBeamPair).noalias() = d_out.transpose() * batch.partial;
    grad_bias(v.out_b()) = d_out.colwise().sum();
  }
  Matrix d_act = d_out * weight(p, v.out_w()).leftCols(last);

  for (std::size_t l = layers; l-- > 0;) {
    Matrix d_pre = std::move(d_act);
    activation_backward(cfg.hidden_activation, tape.hidden_pre[l], d_pre);
    const Matrix& input = l == 0 ? tape.fused : tape.hidden_act[l - 1];
    grad_matrix(v.dense_w(l)).noalias() = d_pre.transpose() * input;
    grad_bias(v.dense_b(l)) = d_pre.colwise().sum();
    d_act = d_pre * weight(p, v.dense_w(l));
  }

  // d_act is now d loss / d fused.
  if (tape.dropout_scale.size() > 0) d_act.array() *= tape.dropout_scale.array();
  const auto head = static_cast<Eigen::Index>(cfg.head_features());
  Matrix d_accel = d_act.leftCols(head);
  Matrix d_gyro = d_act.rightCols(head);
  activation_backward(cfg.conv_activation, tape.accel_pre, d_accel);
  activation_backward(cfg.conv_activation, tape.gyro_pre, d_gyro);
  conv_head_backward(batch.accel, d_accel, cfg, grad.data() + v.accel_w().offset, grad.data() + v.accel_b().offset);
  conv_head_backward(batch.gyro, d_gyro, cfg, grad.data() + v.gyro_w().offset, grad.data() + v.gyro_b().offset);
  return grad;
}

LossGradient loss_and_gradient(const ModelCheckpoint& model, const Batch& batch, const Matrix* dropout_scale,
                               double loss_scale) {
  ForwardTape tape;
  forward_batch(model, batch, dropout_scale, &tape);
  LossGradient out;
  out.loss = mse_loss(tape.output, batch.target, loss_scale);
  out.grad = backward(model, batch, tape, loss_scale);
  return out;
}

namespace {

Vec2 denormalize(const NormStats& norm, Eigen::Index row, const Matrix& out) {
  return Vec2(out(row, 0) * norm.target_beams.std[0] + norm.target_beams.mean[0],
              out(row, 1) * norm.target_beams.std[1] + norm.target_beams.mean[1]);
}

Batch single_batch(const ImuWindow& window, const Vec2& partial, const ModelCheckpoint& model) {
  model.norm.validate();
  const std::size_t T = model.config.window_len;
  Batch b;
  b.accel.resize(1, static_cast<Eigen::Index>(kImuChannels * T));
  b.gyro.resize(1, static_cast<Eigen::Index>(kImuChannels * T));
  normalize_window(window, model.norm, T, b.accel.row(0).data(), b.gyro.row(0).data());
  b.partial.resize(1, 2);
  for (Eigen::Index c = 0; c < 2; ++c) {
    const auto cu = static_cast<std::size_t>(c);
    b.partial(0, c) = (partial(c) - model.norm.partial_beams.mean[cu]) / model.norm.partial_beams.std[cu];
  }
  return b;
}

}  // namespace

Vec2 forward(const ImuWindow& window, const Vec2& partial_beams, const ModelCheckpoint& model, bool training,
             RandomState& rng) {
  const Batch b = single_batch(window, partial_beams, model);
  Matrix out;
  if (training && model.config.dropout > 0.0) {
    const Matrix scale = make_dropout_scale(1, static_cast<Eigen::Index>(model.config.fused_features()),
                                            model.config.dropout, rng);
    out = forward_batch(model, b, &scale);
  } else {
    out = forward_batch(model, b);
  }
  return denormalize(model.norm, 0, out);
}

Vec2 predict(const ImuWindow& window, const Vec2& partial_beams, const ModelCheckpoint& model) {
  return denormalize(model.norm, 0, forward_batch(model, single_batch(window, partial_beams, model)));
}

Matrix predict_tuples(std::span<const TrainingTuple> tuples, const ModelCheckpoint& model) {
  constexpr std::size_t kChunk = 256;
  Matrix out(static_cast<Eigen::Index>(tuples.size()), 2);
  for (std::size_t begin = 0; begin < tuples.size(); begin += kChunk) {
    const std::size_t n = std::min(kChunk, tuples.size() - begin);
    const Batch b = make_batch(tuples.subspan(begin, n), model.norm, model.config.window_len);
    const Matrix normalized = forward_batch(model, b);
    for (Eigen::Index r = 0; r < normalized.rows(); ++r) {
      out.row(static_cast<Eigen::Index>(begin) + r) = denormalize(model.norm, r, normalized).transpose();
    }
  }
  return out;
}

}  // namespace dvlfill::nn
