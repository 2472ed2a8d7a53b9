#include "dvlfill/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

#include "dvlfill/errors.hpp"

namespace dvlfill {
namespace {

using nlohmann::json;

void check_keys(const json& j, std::string_view section, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw ConfigError(fmt::format("config section '{}' must be an object", section));
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError(fmt::format("unknown config key '{}{}{}'", section, section.empty() ? "" : ".", key));
    }
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->template get<T>();
}

Vec4 per_beam(const json& j) {
  if (j.is_number()) return Vec4::Constant(j.get<double>());
  const auto v = j.get<std::vector<double>>();
  if (v.size() != 4) throw ConfigError("per-beam values need a scalar or 4 entries");
  return Vec4(v[0], v[1], v[2], v[3]);
}

json per_beam_json(const Vec4& v) {
  if ((v.array() == v(0)).all()) return v(0);
  return json::array({v(0), v(1), v(2), v(3)});
}

DataPaths paths_from(const json& j, std::string_view section) {
  check_keys(j, section, {"imu_csv", "dvl_csv", "truth_csv", "apply_error_model"});
  DataPaths p;
  read(j, "imu_csv", p.imu_csv);
  read(j, "dvl_csv", p.dvl_csv);
  read(j, "truth_csv", p.truth_csv);
  read(j, "apply_error_model", p.apply_error_model);
  return p;
}

json paths_json(const DataPaths& p) {
  return {{"imu_csv", p.imu_csv}, {"dvl_csv", p.dvl_csv}, {"truth_csv", p.truth_csv},
          {"apply_error_model", p.apply_error_model}};
}

json to_json_doc(const RunConfig& c) {
  const auto& pr = c.simulation.profile;
  json doc = {
      {"seed", c.seed},
      {"pitch_deg", c.pitch_deg},
      {"headings_rad", c.headings_rad},
      {"error_model",
       {{"scale", per_beam_json(c.error_model.scale)},
        {"bias_mps", per_beam_json(c.error_model.bias_mps)},
        {"noise_std_mps", c.error_model.noise_std_mps},
        {"seed", c.error_model.seed}}},
      {"missing_beams", c.missing_beams},
      {"simulation",
       {{"duration_s", c.simulation.duration_s},
        {"test_duration_s", c.simulation.test_duration_s},
        {"seed", c.simulation.seed},
        {"test_seed", c.simulation.test_seed},
        {"profile",
         {{"target_speed_mps", pr.target_speed_mps},
          {"surge_rms_fraction", pr.surge_rms_fraction},
          {"sway_amplitude_mps", pr.sway_amplitude_mps},
          {"heave_amplitude_mps", pr.heave_amplitude_mps},
          {"harmonics", pr.harmonics},
          {"min_period_s", pr.min_period_s},
          {"max_period_s", pr.max_period_s},
          {"pitch_per_surge", pr.pitch_per_surge},
          {"pitch_per_heave", pr.pitch_per_heave},
          {"roll_per_sway", pr.roll_per_sway},
          {"yaw_rate_amplitude_radps", pr.yaw_rate_amplitude_radps},
          {"accel_noise_mps2", pr.accel_noise_mps2},
          {"gyro_noise_radps", pr.gyro_noise_radps},
          {"imu_rate_hz", pr.imu_rate_hz}}}}},
      {"dataset", paths_json(c.dataset)},
      {"assemble", {{"window_len", c.assemble.window_len}, {"window_s", c.assemble.window_s}}},
      {"train_frac", c.train_frac},
      {"network",
       {{"conv_filters", c.network.conv_filters},
        {"kernel_size", c.network.kernel_size},
        {"conv_activation", nn::to_string(c.network.conv_activation)},
        {"hidden", c.network.hidden},
        {"hidden_activation", nn::to_string(c.network.hidden_activation)},
        {"dropout", c.network.dropout},
        {"seed", c.network_seed}}},
      {"training",
       {{"epochs", c.training.epochs},
        {"batch_size", c.training.batch_size},
        {"lr", c.training.lr},
        {"rmsprop_decay", c.training.rmsprop_decay},
        {"rmsprop_eps", c.training.rmsprop_eps},
        {"shuffle_seed", c.training.shuffle_seed},
        {"dropout_seed", c.training.dropout_seed},
        {"loss", c.training.loss},
        {"threads", c.training.threads},
        {"deterministic", c.training.deterministic}}},
      {"out_dir", c.out_dir},
  };
  if (c.test_dataset) doc["test_dataset"] = paths_json(*c.test_dataset);
  return doc;
}

}  // namespace

void RunConfig::apply_seed(std::uint64_t master) {
  seed = master;
  error_model.seed = derive_seed(master, "dvl-noise");
  simulation.seed = derive_seed(master, "simulation");
  simulation.test_seed = derive_seed(master, "simulation-test");
  network_seed = derive_seed(master, "network-init");
  training.shuffle_seed = derive_seed(master, "shuffle");
  training.dropout_seed = derive_seed(master, "dropout");
}

void RunConfig::validate() const {
  try {
    (void)BeamGeometry(pitch_deg, headings_rad);
    error_model.validate();
    const BeamMask mask = available_mask();
    std::set<int> distinct(missing_beams.begin(), missing_beams.end());
    if (mask.count() != 2 || distinct.size() != missing_beams.size()) {
      throw ConfigError(fmt::format("missing_beams must name exactly two distinct beams, got [{}]",
                                    fmt::join(missing_beams, ",")));
    }
    if (!(train_frac > 0.0 && train_frac < 1.0)) throw ConfigError("train_frac must lie in (0, 1)");
    if (!(simulation.duration_s >= 0.0) || !(simulation.test_duration_s >= 0.0)) {
      throw ConfigError("simulation durations must be >= 0");
    }
    if (network.window_len != assemble.window_len) throw ConfigError("network and assembly window lengths differ");
    network.validate();
    training.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

std::string RunConfig::to_json() const { return to_json_doc(*this).dump(2); }

std::string RunConfig::hash() const {
  json doc = to_json_doc(*this);
  // Execution resources do not change results in deterministic mode.
  doc["training"].erase("threads");
  doc.erase("out_dir");
  return fmt::format("{:016x}", fnv1a64(doc.dump()));
}

RunConfig RunConfig::from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("config is not valid JSON: {}", e.what()));
  }
  RunConfig c;
  try {
    check_keys(doc, "", {"seed", "pitch_deg", "headings_rad", "error_model", "missing_beams", "simulation", "dataset",
                         "test_dataset", "assemble", "train_frac", "network", "training", "out_dir"});
    c.apply_seed(doc.value("seed", c.seed));
    read(doc, "pitch_deg", c.pitch_deg);
    if (doc.contains("headings_rad")) {
      const auto h = doc["headings_rad"].get<std::vector<double>>();
      if (h.size() != 4) throw ConfigError("headings_rad needs 4 entries");
      std::copy(h.begin(), h.end(), c.headings_rad.begin());
    }
    if (doc.contains("error_model")) {
      const json& j = doc["error_model"];
      check_keys(j, "error_model", {"scale", "bias_mps", "noise_std_mps", "seed"});
      if (j.contains("scale")) c.error_model.scale = per_beam(j["scale"]);
      if (j.contains("bias_mps")) c.error_model.bias_mps = per_beam(j["bias_mps"]);
      read(j, "noise_std_mps", c.error_model.noise_std_mps);
      read(j, "seed", c.error_model.seed);
    }
    read(doc, "missing_beams", c.missing_beams);
    if (doc.contains("simulation")) {
      const json& j = doc["simulation"];
      check_keys(j, "simulation", {"duration_s", "test_duration_s", "seed", "test_seed", "profile"});
      read(j, "duration_s", c.simulation.duration_s);
      read(j, "test_duration_s", c.simulation.test_duration_s);
      read(j, "seed", c.simulation.seed);
      read(j, "test_seed", c.simulation.test_seed);
      if (j.contains("profile")) {
        const json& p = j["profile"];
        auto& pr = c.simulation.profile;
        check_keys(p, "simulation.profile",
                   {"target_speed_mps", "surge_rms_fraction", "sway_amplitude_mps", "heave_amplitude_mps", "harmonics",
                    "min_period_s", "max_period_s", "pitch_per_surge", "pitch_per_heave", "roll_per_sway",
                    "yaw_rate_amplitude_radps", "accel_noise_mps2", "gyro_noise_radps", "imu_rate_hz"});
        read(p, "target_speed_mps", pr.target_speed_mps);
        read(p, "surge_rms_fraction", pr.surge_rms_fraction);
        read(p, "sway_amplitude_mps", pr.sway_amplitude_mps);
        read(p, "heave_amplitude_mps", pr.heave_amplitude_mps);
        read(p, "harmonics", pr.harmonics);
        read(p, "min_period_s", pr.min_period_s);
        read(p, "max_period_s", pr.max_period_s);
        read(p, "pitch_per_surge", pr.pitch_per_surge);
        read(p, "pitch_per_heave", pr.pitch_per_heave);
        read(p, "roll_per_sway", pr.roll_per_sway);
        read(p, "yaw_rate_amplitude_radps", pr.yaw_rate_amplitude_radps);
        read(p, "accel_noise_mps2", pr.accel_noise_mps2);
        read(p, "gyro_noise_radps", pr.gyro_noise_radps);
        read(p, "imu_rate_hz", pr.imu_rate_hz);
      }
    }
    if (doc.contains("dataset")) c.dataset = paths_from(doc["dataset"], "dataset");
    if (doc.contains("test_dataset")) c.test_dataset = paths_from(doc["test_dataset"], "test_dataset");
    if (doc.contains("assemble")) {
      const json& j = doc["assemble"];
      check_keys(j, "assemble", {"window_len", "window_s"});
      read(j, "window_len", c.assemble.window_len);
      read(j, "window_s", c.assemble.window_s);
    }
    c.network.window_len = c.assemble.window_len;
    read(doc, "train_frac", c.train_frac);
    if (doc.contains("network")) {
      const json& j = doc["network"];
      check_keys(j, "network",
                 {"conv_filters", "kernel_size", "conv_activation", "hidden", "hidden_activation", "dropout", "seed"});
      read(j, "conv_filters", c.network.conv_filters);
      read(j, "kernel_size", c.network.kernel_size);
      if (j.contains("conv_activation")) {
        c.network.conv_activation = nn::activation_from_string(j["conv_activation"].get<std::string>());
      }
      read(j, "hidden", c.network.hidden);
      if (j.contains("hidden_activation")) {
        c.network.hidden_activation = nn::activation_from_string(j["hidden_activation"].get<std::string>());
      }
      read(j, "dropout", c.network.dropout);
      read(j, "seed", c.network_seed);
    }
    if (doc.contains("training")) {
      const json& j = doc["training"];
      check_keys(j, "training",
                 {"epochs", "batch_size", "lr", "rmsprop_decay", "rmsprop_eps", "shuffle_seed", "dropout_seed", "loss",
                  "threads", "deterministic"});
      read(j, "epochs", c.training.epochs);
      read(j, "batch_size", c.training.batch_size);
      read(j, "lr", c.training.lr);
      read(j, "rmsprop_decay", c.training.rmsprop_decay);
      read(j, "rmsprop_eps", c.training.rmsprop_eps);
      read(j, "shuffle_seed", c.training.shuffle_seed);
      read(j, "dropout_seed", c.training.dropout_seed);
      read(j, "loss", c.training.loss);
      read(j, "threads", c.training.threads);
      read(j, "deterministic", c.training.deterministic);
    }
    read(doc, "out_dir", c.out_dir);
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("bad config value: {}", e.what()));
  }
  c.validate();
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot open config {}", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json(buf.str());
}

}  // namespace dvlfill
