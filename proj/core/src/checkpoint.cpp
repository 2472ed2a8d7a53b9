#include "dvlfill/checkpoint.hpp"

#include <array>
#include <bit>
#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "dvlfill/errors.hpp"

namespace dvlfill {
namespace {

using nlohmann::json;

constexpr std::string_view kAlphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int decode_char(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

std::string encode_floats(std::span<const double> values) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(values.size() * 4);
  for (double v : values) {
    const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
    for (int shift = 0; shift < 32; shift += 8) bytes.push_back(static_cast<std::uint8_t>(bits >> shift));
  }
  return encode_base64(bytes);
}

std::vector<double> decode_floats(std::string_view text, std::size_t expected, std::string_view name) {
  const std::vector<std::uint8_t> bytes = decode_base64(text);
  if (bytes.size() != expected * 4) {
    throw CheckpointError(fmt::format("parameter '{}' holds {} bytes, expected {}", name, bytes.size(), expected * 4));
  }
  std::vector<double> out(expected);
  for (std::size_t i = 0; i < expected; ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(bytes[4 * i + static_cast<std::size_t>(b)]) << (8 * b);
    out[i] = static_cast<double>(std::bit_cast<float>(bits));
  }
  return out;
}

json stats_json(const nn::ChannelStats& s) { return json{{"mean", s.mean}, {"std", s.std}}; }

nn::ChannelStats stats_from(const json& j) {
  return nn::ChannelStats{j.at("mean").get<std::vector<double>>(), j.at("std").get<std::vector<double>>()};
}

json layer_specs(const nn::NetworkConfig& cfg) {
  json specs = json::array();
  for (const char* head : {"accel_conv", "gyro_conv"}) {
    specs.push_back({{"name", head},
                     {"kind", "conv1d"},
                     {"in_channels", nn::kImuChannels},
                     {"out_channels", cfg.conv_filters},
                     {"kernel", cfg.kernel_size},
                     {"input_length", cfg.window_len},
                     {"activation", nn::to_string(cfg.conv_activation)}});
  }
  specs.push_back({{"name", "fusion_dropout"}, {"kind", "dropout"}, {"features", cfg.fused_features()}, {"p", cfg.dropout}});
  std::size_t fan_in = cfg.fused_features();
  for (std::size_t l = 0; l < cfg.hidden.size(); ++l) {
    specs.push_back({{"name", fmt::format("dense{}", l)},
                     {"kind", "dense"},
                     {"in", fan_in},
                     {"out", cfg.hidden[l]},
                     {"activation", nn::to_string(cfg.hidden_activation)}});
    fan_in = cfg.hidden[l];
  }
  specs.push_back({{"name", "output"},
                   {"kind", "dense"},
                   {"in", fan_in + nn::kBeamPair},
                   {"out", nn::kBeamPair},
                   {"activation", "linear"},
                   {"concat", "partial_beams"}});
  return specs;
}

nn::NetworkConfig config_from_specs(const json& specs) {
  nn::NetworkConfig cfg;
  cfg.hidden.clear();
  bool seen_conv = false;
  bool seen_output = false;
  for (const json& layer : specs) {
    const std::string kind = layer.at("kind").get<std::string>();
    const std::string name = layer.at("name").get<std::string>();
    if (kind == "conv1d") {
      cfg.window_len = layer.at("input_length").get<std::size_t>();
      cfg.conv_filters = layer.at("out_channels").get<std::size_t>();
      cfg.kernel_size = layer.at("kernel").get<std::size_t>();
      cfg.conv_activation = nn::activation_from_string(layer.at("activation").get<std::string>());
      seen_conv = true;
    } else if (kind == "dropout") {
      cfg.dropout = layer.at("p").get<double>();
    } else if (kind == "dense" && name == "output") {
      seen_output = true;
    } else if (kind == "dense") {
      cfg.hidden.push_back(layer.at("out").get<std::size_t>());
      cfg.hidden_activation = nn::activation_from_string(layer.at("activation").get<std::string>());
    } else {
      throw CheckpointError(fmt::format("unknown layer kind '{}'", kind));
    }
  }
  if (!seen_conv || !seen_output) throw CheckpointError("layer_specs lack the conv heads or the output layer");
  cfg.validate();
  if (layer_specs(cfg) != specs) throw CheckpointError("layer_specs are internally inconsistent");
  return cfg;
}

}  // namespace

std::string encode_base64(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t n = (std::uint32_t{bytes[i]} << 16) | (std::uint32_t{bytes[i + 1]} << 8) | bytes[i + 2];
    out.push_back(kAlphabet[(n >> 18) & 63]);
    out.push_back(kAlphabet[(n >> 12) & 63]);
    out.push_back(kAlphabet[(n >> 6) & 63]);
    out.push_back(kAlphabet[n & 63]);
  }
  const std::size_t rest = bytes.size() - i;
  if (rest > 0) {
    std::uint32_t n = std::uint32_t{bytes[i]} << 16;
    if (rest == 2) n |= std::uint32_t{bytes[i + 1]} << 8;
    out.push_back(kAlphabet[(n >> 18) & 63]);
    out.push_back(kAlphabet[(n >> 12) & 63]);
    out.push_back(rest == 2 ? kAlphabet[(n >> 6) & 63] : '=');
    out.push_back('=');
  }
  return out;
}

std::vector<std::uint8_t> decode_base64(std::string_view text) {
  if (text.size() % 4 != 0) throw CheckpointError("base64 length is not a multiple of 4");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    std::array<int, 4> v{};
    int pad = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      const char c = text[i + k];
      if (c == '=' && i + 4 == text.size() && k >= 2) {
        v[k] = 0;
        ++pad;
        continue;
      }
      if (pad > 0) throw CheckpointError("base64 padding in the middle of a quantum");
      v[k] = decode_char(c);
      if (v[k] < 0) throw CheckpointError(fmt::format("invalid base64 character '{}'", c));
    }
    const std::uint32_t n = (static_cast<std::uint32_t>(v[0]) << 18) | (static_cast<std::uint32_t>(v[1]) << 12) |
                            (static_cast<std::uint32_t>(v[2]) << 6) | static_cast<std::uint32_t>(v[3]);
    out.push_back(static_cast<std::uint8_t>(n >> 16));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>(n >> 8));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(n));
  }
  return out;
}

std::string checkpoint_to_json(const nn::ModelCheckpoint& model) {
  const auto slots = nn::parameter_layout(model.config);
  if (model.params.size() != nn::parameter_count(model.config)) {
    throw CheckpointError("parameter vector does not match the topology");
  }
  json params = json::object();
  for (const auto& s : slots) {
    params[s.name] = {{"shape", s.shape},
                      {"dtype", "float32-le"},
                      {"data", encode_floats(std::span(model.params).subspan(s.offset, s.size))}};
  }
  const auto& m = model.meta;
  json meta = {{"seed", m.seed},
               {"epochs_trained", m.epochs_trained},
               {"config_hash", m.config_hash},
               {"topology_hash", fmt::format("{:016x}", model.config.topology_hash())},
               {"param_count", model.params.size()},
               {"missing_beams", m.missing_beams},
               {"pitch_deg", m.pitch_deg},
               {"selection", m.selection},
               {"selected_epoch", m.selected_epoch}};
  meta["validation_loss"] = m.validation_loss ? json(*m.validation_loss) : json(nullptr);

  const json doc = {{"format", kCheckpointFormat},
                    {"layer_specs", layer_specs(model.config)},
                    {"norm_stats",
                     {{"accel", stats_json(model.norm.accel)},
                      {"gyro", stats_json(model.norm.gyro)},
                      {"partial_beams", stats_json(model.norm.partial_beams)},
                      {"target_beams", stats_json(model.norm.target_beams)}}},
                    {"meta", meta},
                    {"parameters", params}};
  return doc.dump(1);
}

nn::ModelCheckpoint checkpoint_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw CheckpointError(fmt::format("checkpoint is not valid JSON: {}", e.what()));
  }
  try {
    if (doc.at("format").get<std::string>() != kCheckpointFormat) {
      throw CheckpointError(fmt::format("unsupported checkpoint format '{}'", doc.at("format").get<std::string>()));
    }
    nn::ModelCheckpoint model;
    model.config = config_from_specs(doc.at("layer_specs"));

    const json& ns = doc.at("norm_stats");
    model.norm.accel = stats_from(ns.at("accel"));
    model.norm.gyro = stats_from(ns.at("gyro"));
    model.norm.partial_beams = stats_from(ns.at("partial_beams"));
    model.norm.target_beams = stats_from(ns.at("target_beams"));
    try {
      model.norm.validate();
    } catch (const ContractViolation& e) {
      throw CheckpointError(e.what());
    }

    const json& meta = doc.at("meta");
    model.meta.seed = meta.at("seed").get<std::uint64_t>();
    model.meta.epochs_trained = meta.at("epochs_trained").get<std::size_t>();
    model.meta.config_hash = meta.at("config_hash").get<std::string>();
    model.meta.missing_beams = meta.at("missing_beams").get<std::vector<int>>();
    model.meta.pitch_deg = meta.at("pitch_deg").get<double>();
    model.meta.selection = meta.at("selection").get<std::string>();
    model.meta.selected_epoch = meta.at("selected_epoch").get<std::size_t>();
    if (!meta.at("validation_loss").is_null()) model.meta.validation_loss = meta.at("validation_loss").get<double>();
    if (meta.at("topology_hash").get<std::string>() != fmt::format("{:016x}", model.config.topology_hash())) {
      throw CheckpointError("topology hash does not match layer_specs");
    }

    const auto slots = nn::parameter_layout(model.config);
    model.params.resize(nn::parameter_count(model.config));
    const json& params = doc.at("parameters");
    if (params.size() != slots.size()) throw CheckpointError("parameter tensor count does not match layer_specs");
    for (const auto& s : slots) {
      const json& entry = params.at(s.name);
      if (entry.at("shape").get<std::vector<std::size_t>>() != s.shape) {
        throw CheckpointError(fmt::format("parameter '{}' has the wrong shape", s.name));
      }
      if (entry.at("dtype").get<std::string>() != "float32-le") {
        throw CheckpointError(fmt::format("parameter '{}' has unsupported dtype", s.name));
      }
      const auto values = decode_floats(entry.at("data").get<std::string>(), s.size, s.name);
      std::copy(values.begin(), values.end(), model.params.begin() + static_cast<std::ptrdiff_t>(s.offset));
    }
    if (meta.at("param_count").get<std::size_t>() != model.params.size()) {
      throw CheckpointError("param_count does not match the topology");
    }
    return model;
  } catch (const json::exception& e) {
    throw CheckpointError(fmt::format("malformed checkpoint: {}", e.what()));
  } catch (const ConfigError& e) {
    throw CheckpointError(fmt::format("malformed checkpoint: {}", e.what()));
  }
}

void save_checkpoint(const std::filesystem::path& path, const nn::ModelCheckpoint& model) {
  const std::string text = checkpoint_to_json(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot write checkpoint {}", path.string()));
  out << text << '\n';
}

nn::ModelCheckpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError(fmt::format("cannot open checkpoint {}", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return checkpoint_from_json(buf.str());
}

std::string file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot open {}", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return fmt::format("{:016x}", fnv1a64(buf.str()));
}

}  // namespace dvlfill
