// dvlfill: simulate sensor data, train the beam regressor, evaluate it and
// regress the missing beams for a single epoch.
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "dvlfill/checkpoint.hpp"
#include "dvlfill/config.hpp"
#include "dvlfill/csv.hpp"
#include "dvlfill/errors.hpp"
#include "dvlfill/metrics.hpp"
#include "dvlfill/pipeline.hpp"
#include "dvlfill/solver.hpp"
#include "dvlfill/training.hpp"
#include "dvlfill/trajectory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace dvlfill;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitUser = 2;

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> threads;
  bool deterministic = false;
  std::string checkpoint;
  std::string input;
};

RunConfig resolve_config(const GlobalOptions& opt) {
  RunConfig cfg = opt.config_path.empty() ? RunConfig{} : RunConfig::load(opt.config_path);
  if (opt.config_path.empty()) cfg.apply_seed(cfg.seed);
  if (opt.seed) cfg.apply_seed(*opt.seed);
  if (opt.out) cfg.out_dir = *opt.out;
  if (opt.threads) cfg.training.threads = *opt.threads;
  if (opt.deterministic) cfg.training.deterministic = true;
  cfg.validate();
  return cfg;
}

void ensure_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ConfigError(fmt::format("cannot create output directory {}: {}", dir.string(), ec.message()));
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw ConfigError(fmt::format("cannot write {}", path.string()));
}

DataPaths simulated_paths(const fs::path& dir, const std::string& prefix) {
  DataPaths p;
  p.imu_csv = (dir / (prefix + "imu.csv")).string();
  p.dvl_csv = (dir / (prefix + "dvl.csv")).string();
  p.truth_csv = (dir / (prefix + "truth.csv")).string();
  return p;
}

DataPaths train_paths(const RunConfig& cfg) {
  return cfg.dataset.empty() ? simulated_paths(cfg.out_dir, "") : cfg.dataset;
}

std::optional<DataPaths> test_paths(const RunConfig& cfg) {
  if (cfg.test_dataset) return cfg.test_dataset;
  if (!cfg.dataset.empty()) return std::nullopt;
  DataPaths p = simulated_paths(cfg.out_dir, "test_");
  if (fs::exists(p.imu_csv) && fs::exists(p.dvl_csv)) return p;
  return std::nullopt;
}

std::vector<TrainingTuple> load_tuples(const DataPaths& paths, const RunConfig& cfg, std::string_view label) {
  TupleSet set = build_tuples(load_dataset(paths, cfg), cfg);
  fmt::print("{}: {} tuples", label, set.tuples.size());
  if (set.gaps.count() > 0) {
    fmt::print(" ({} epochs skipped: {} IMU gaps, {} invalid beams, {} without truth)", set.gaps.count(),
               set.gaps.imu_gaps, set.gaps.invalid_beams, set.gaps.missing_truth);
  }
  fmt::print("\n");
  return std::move(set.tuples);
}

json run_summary(const SimulatedRun& run, const fs::path& dir, const std::string& prefix) {
  const DataPaths p = simulated_paths(dir, prefix);
  write_imu_csv(p.imu_csv, run.imu);
  write_dvl_csv(p.dvl_csv, run.dvl);
  write_truth_csv(p.truth_csv, run.truth);
  return {{"imu_rows", run.imu.size()},
          {"dvl_rows", run.dvl.size()},
          {"mean_speed_mps", run.mean_speed_mps},
          {"files",
           {{fs::path(p.imu_csv).filename().string(), file_hash(p.imu_csv)},
            {fs::path(p.dvl_csv).filename().string(), file_hash(p.dvl_csv)},
            {fs::path(p.truth_csv).filename().string(), file_hash(p.truth_csv)}}}};
}

int cmd_simulate(const RunConfig& cfg) {
  const fs::path dir = cfg.out_dir;
  ensure_out_dir(dir);
  const auto& sim = cfg.simulation;

  json manifest = {{"config_hash", cfg.hash()}, {"config", json::parse(cfg.to_json())}};
  const SimulatedRun run = simulate_training_run(cfg);
  manifest["train"] = run_summary(run, dir, "");
  fmt::print("simulated {:g} s: {} IMU rows, {} DVL epochs, mean speed {:.4f} m/s\n", sim.duration_s, run.imu.size(),
             run.dvl.size(), run.mean_speed_mps);

  if (sim.test_duration_s > 0.0) {
    const SimulatedRun test = simulate_test_run(cfg);
    manifest["test"] = run_summary(test, dir, "test_");
    fmt::print("simulated test run {:g} s: {} IMU rows, {} DVL epochs, mean speed {:.4f} m/s\n",
               sim.test_duration_s, test.imu.size(), test.dvl.size(), test.mean_speed_mps);
  }
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  fmt::print("wrote {} (config {})\n", dir.string(), cfg.hash());
  return kExitOk;
}

int cmd_train(const RunConfig& cfg) {
  const fs::path dir = cfg.out_dir;
  const std::vector<TrainingTuple> tuples = load_tuples(train_paths(cfg), cfg, "dataset");
  if (tuples.size() < 2) throw ConfigError("dataset yields fewer than two tuples");
  const auto [train_set, val_set] = split(tuples, cfg.train_frac);
  if (train_set.empty() || val_set.empty()) throw ConfigError("train_frac leaves an empty split");
  fmt::print("training on {} tuples, validating on {}; {} parameters, {} epochs\n", train_set.size(), val_set.size(),
             nn::parameter_count(cfg.network), cfg.training.epochs);
  ensure_out_dir(dir);

  const TrainResult result = train_model(cfg, train_set, val_set, [](const EpochLoss& e) {
    fmt::print("epoch {:>3}  train {:.6f}  val {:.6f}\n", e.epoch, e.train_loss, e.val_loss.value_or(0.0));
  });

  std::string curve = "epoch,train_loss,val_loss\n";
  for (const EpochLoss& e : result.history) {
    curve += e.val_loss ? fmt::format("{},{},{}\n", e.epoch, e.train_loss, *e.val_loss)
                        : fmt::format("{},{},\n", e.epoch, e.train_loss);
  }
  write_text(dir / "loss_curve.csv", curve);
  save_checkpoint(dir / "checkpoint.json", result.final_checkpoint);
  save_checkpoint(dir / "checkpoint_best.json", result.best_checkpoint);

  const EpochLoss& last = result.history.back();
  fmt::print("final train loss {:.6f}, val loss {:.6f}; best val at epoch {}\n", last.train_loss,
             last.val_loss.value_or(0.0), result.best_epoch);
  fmt::print("checkpoint {} hash {}\n", (dir / "checkpoint.json").string(), file_hash(dir / "checkpoint.json"));
  return kExitOk;
}

fs::path checkpoint_path(const GlobalOptions& opt, const RunConfig& cfg) {
  return opt.checkpoint.empty() ? fs::path(cfg.out_dir) / "checkpoint.json" : fs::path(opt.checkpoint);
}

nn::ModelCheckpoint load_matching_checkpoint(const GlobalOptions& opt, const RunConfig& cfg) {
  const fs::path path = checkpoint_path(opt, cfg);
  nn::ModelCheckpoint model = load_checkpoint(path);
  if (BeamMask::with_missing(model.meta.missing_beams) != cfg.available_mask()) {
    throw ConfigError(fmt::format("checkpoint was trained with missing beams [{}] but the config asks for [{}]",
                                  fmt::join(model.meta.missing_beams, ","), fmt::join(cfg.missing_beams, ",")));
  }
  if (std::abs(model.meta.pitch_deg - cfg.pitch_deg) > 1e-9) {
    throw ConfigError(fmt::format("checkpoint was trained at pitch {} deg but the config uses {} deg",
                                  model.meta.pitch_deg, cfg.pitch_deg));
  }
  if (model.config.window_len != cfg.assemble.window_len) {
    throw ConfigError(fmt::format("checkpoint window length {} differs from the config's {}", model.config.window_len,
                                  cfg.assemble.window_len));
  }
  return model;
}

int cmd_evaluate(const GlobalOptions& opt, const RunConfig& cfg) {
  const nn::ModelCheckpoint model = load_matching_checkpoint(opt, cfg);
  const BeamGeometry geometry = cfg.geometry();
  const std::vector<TrainingTuple> tuples = load_tuples(train_paths(cfg), cfg, "dataset");
  const auto [train_set, val_set] = split(tuples, cfg.train_frac);

  const BatchRegressor net = network_regressor(model);
  const BatchRegressor baseline = mean_beam_regressor(model.norm);
  std::vector<NamedReport> reports;
  auto add = [&](const std::string& name, std::span<const TrainingTuple> set, const BatchRegressor& r) {
    if (set.size() >= 2) reports.emplace_back(name, evaluate_regressor(set, r, geometry).report);
  };
  add("train", train_set, net);
  add("validation", val_set, net);
  add("baseline validation", val_set, baseline);
  if (const auto paths = test_paths(cfg)) {
    const std::vector<TrainingTuple> test_set = load_tuples(*paths, cfg, "test set");
    add("test", test_set, net);
    add("baseline test", test_set, baseline);
  }
  if (reports.empty()) throw ConfigError("no evaluation split holds two or more tuples");

  const fs::path dir = cfg.out_dir;
  ensure_out_dir(dir);
  const fs::path ckpt = checkpoint_path(opt, cfg);
  json doc = json::parse(metrics_json(reports, cfg.hash()));
  doc["checkpoint"] = {{"path", ckpt.string()},
                       {"hash", file_hash(ckpt)},
                       {"selection", model.meta.selection},
                       {"selected_epoch", model.meta.selected_epoch}};
  const std::string table = format_table(reports);
  const std::string heading = fmt::format("config {}, checkpoint {} ({}, epoch {})\n", cfg.hash(), ckpt.string(),
                                          model.meta.selection, model.meta.selected_epoch);
  write_text(dir / "metrics.json", doc.dump(2) + "\n");
  write_text(dir / "metrics.txt", heading + table);
  fmt::print("{}{}", heading, table);
  return kExitOk;
}

WindowMatrix window_from_json(const json& rows, std::size_t window_len, std::string_view name) {
  if (!rows.is_array() || rows.size() != window_len) {
    throw ConfigError(fmt::format("'{}' must be an array of {} rows", name, window_len));
  }
  WindowMatrix m(static_cast<Eigen::Index>(window_len), 3);
  for (std::size_t r = 0; r < window_len; ++r) {
    const auto row = rows[r].get<std::vector<double>>();
    if (row.size() != 3) throw ConfigError(fmt::format("'{}' row {} must hold 3 values", name, r));
    for (Eigen::Index c = 0; c < 3; ++c) {
      if (!std::isfinite(row[static_cast<std::size_t>(c)])) {
        throw ConfigError(fmt::format("'{}' row {} is not finite", name, r));
      }
      m(static_cast<Eigen::Index>(r), c) = row[static_cast<std::size_t>(c)];
    }
  }
  return m;
}

int cmd_predict(const GlobalOptions& opt, const RunConfig& cfg) {
  const nn::ModelCheckpoint model = load_matching_checkpoint(opt, cfg);
  std::ifstream in(opt.input, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot open input {}", opt.input));
  std::ostringstream buf;
  buf << in.rdbuf();

  ImuWindow window;
  Vec2 partial;
  try {
    const json doc = json::parse(buf.str());
    window.accel_mps2 = window_from_json(doc.at("accel"), model.config.window_len, "accel");
    window.gyro_radps = window_from_json(doc.at("gyro"), model.config.window_len, "gyro");
    const auto beams = doc.at("partial_beams").get<std::vector<double>>();
    if (beams.size() != 2 || !std::isfinite(beams[0]) || !std::isfinite(beams[1])) {
      throw ConfigError("'partial_beams' must hold 2 finite values");
    }
    partial = Vec2(beams[0], beams[1]);
    window.epoch_s = doc.value("t", 0.0);
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("malformed input {}: {}", opt.input, e.what()));
  }

  const BeamMask mask = cfg.available_mask();
  const Vec2 regressed = nn::predict(window, partial, model);
  const VelocityEstimate est = solve_with_regressed(partial, regressed, mask, cfg.geometry().h());
  const Vec4 beams = interleave_beams(partial, regressed, mask);

  const json out = {{"missing_beams", mask.missing_beams()},
                    {"regressed_beams_mps", {regressed(0), regressed(1)}},
                    {"beams_mps", {beams(0), beams(1), beams(2), beams(3)}},
                    {"velocity_mps", {est.v_body_mps(0), est.v_body_mps(1), est.v_body_mps(2)}},
                    {"speed_mps", est.v_body_mps.norm()},
                    {"condition_number", est.condition_number},
                    {"config_hash", cfg.hash()}};
  fmt::print("{}\n", out.dump(2));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Missing DVL beam regression: simulate, train, evaluate, predict"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions opt;
  app.add_option("--config", opt.config_path, "JSON run configuration");
  app.add_option("--seed", opt.seed, "master seed; re-derives every component seed");
  app.add_option("--out", opt.out, "output directory");
  app.add_option("--threads", opt.threads, "worker threads for training")->check(CLI::PositiveNumber);
  app.add_flag("--deterministic", opt.deterministic, "fixed gradient partition and reduction order");

  auto* simulate_cmd = app.add_subcommand("simulate", "write synthetic IMU, DVL and truth CSVs");
  auto* train_cmd = app.add_subcommand("train", "train the regressor and write checkpoints and a loss curve");
  auto* evaluate_cmd = app.add_subcommand("evaluate", "score a checkpoint and a mean-beam baseline");
  evaluate_cmd->add_option("--checkpoint", opt.checkpoint, "checkpoint JSON (default <out>/checkpoint.json)");
  auto* predict_cmd = app.add_subcommand("predict", "regress the missing beams for one window");
  predict_cmd->add_option("--checkpoint", opt.checkpoint, "checkpoint JSON (default <out>/checkpoint.json)");
  predict_cmd->add_option("--input", opt.input, "JSON with accel[T][3], gyro[T][3], partial_beams[2]")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUser;
  }

  try {
    const RunConfig cfg = resolve_config(opt);
    if (*simulate_cmd) return cmd_simulate(cfg);
    if (*train_cmd) return cmd_train(cfg);
    if (*evaluate_cmd) return cmd_evaluate(opt, cfg);
    if (*predict_cmd) return cmd_predict(opt, cfg);
  } catch (const ConfigError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitUser;
  } catch (const CsvError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitUser;
  } catch (const CheckpointError& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kExitUser;
  } catch (const std::exception& e) {
    fmt::print(stderr, "internal error: {}\n", e.what());
    return kExitInternal;
  }
  return kExitInternal;
}
