#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "dvlfill/checkpoint.hpp"
#include "dvlfill/solver.hpp"

using namespace dvlfill;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           (std::string("dvlfill_cli_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args) {
    const std::string cmd = std::string(DVLFILL_CLI) + " " + args + " > " + (dir_ / "stdout.txt").string() + " 2> " +
                            (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string read(const fs::path& p) const {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  std::size_t lines(const fs::path& p) const {
    const std::string text = read(p);
    return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
  }

  fs::path write_config(const std::string& name, const std::string& body) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << body;
    return p;
  }

  fs::path dir_;
};

constexpr const char* kSmall = R"({"simulation": {"duration_s": 60, "test_duration_s": 30},
  "network": {"hidden": [16, 8]}, "training": {"epochs": 2}})";

}  // namespace

TEST_F(Cli, SimulateCountsAndDeterminism) {
  const fs::path cfg = write_config("c.json", R"({"simulation": {"duration_s": 600, "test_duration_s": 0}})");
  ASSERT_EQ(run("simulate --config " + cfg.string() + " --out " + (dir_ / "a").string()), 0);
  ASSERT_EQ(run("simulate --config " + cfg.string() + " --out " + (dir_ / "b").string()), 0);
  EXPECT_EQ(lines(dir_ / "a" / "dvl.csv"), 601u);
  EXPECT_EQ(lines(dir_ / "a" / "imu.csv"), 60001u);
  EXPECT_EQ(lines(dir_ / "a" / "truth.csv"), 601u);
  for (const char* f : {"imu.csv", "dvl.csv", "truth.csv"}) {
    EXPECT_EQ(file_hash(dir_ / "a" / f), file_hash(dir_ / "b" / f)) << f;
  }
  const json manifest = json::parse(read(dir_ / "a" / "manifest.json"));
  EXPECT_EQ(manifest.at("train").at("dvl_rows"), 600);
  EXPECT_EQ(manifest.at("config_hash").get<std::string>().size(), 16u);
  ASSERT_EQ(run("simulate --config " + cfg.string() + " --seed 2 --out " + (dir_ / "c").string()), 0);
  EXPECT_NE(file_hash(dir_ / "a" / "dvl.csv"), file_hash(dir_ / "c" / "dvl.csv"));
}

TEST_F(Cli, ZeroDurationWritesHeaders) {
  const fs::path cfg = write_config("c.json", R"({"simulation": {"duration_s": 0, "test_duration_s": 0}})");
  ASSERT_EQ(run("simulate --config " + cfg.string() + " --out " + dir_.string()), 0);
  EXPECT_EQ(read(dir_ / "dvl.csv"), "t,b1,b2,b3,b4\n");
  EXPECT_EQ(read(dir_ / "imu.csv"), "t,fx,fy,fz,wx,wy,wz\n");
}

TEST_F(Cli, MissingImuFileIsUserError) {
  const fs::path missing = dir_ / "nowhere" / "imu.csv";
  const fs::path cfg = write_config(
      "c.json", R"({"dataset": {"imu_csv": ")" + missing.string() + R"(", "dvl_csv": "dvl.csv"}})");
  EXPECT_EQ(run("train --config " + cfg.string()), 2);
  EXPECT_NE(read(dir_ / "stderr.txt").find(missing.string()), std::string::npos);
}

TEST_F(Cli, BadArgumentsAreUserErrors) {
  EXPECT_EQ(run("simulate --threads 0"), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("simulate --config " + (dir_ / "absent.json").string()), 2);
  const fs::path cfg = write_config("c.json", R"({"missing_beams": [1]})");
  EXPECT_EQ(run("simulate --config " + cfg.string()), 2);
}

TEST_F(Cli, TrainEvaluatePredict) {
  const fs::path cfg = write_config("c.json", kSmall);
  const std::string base = "--config " + cfg.string() + " --out " + (dir_ / "run").string();
  ASSERT_EQ(run(base + " simulate"), 0);
  ASSERT_EQ(run(base + " train --deterministic"), 0);
  const std::string first = file_hash(dir_ / "run" / "checkpoint.json");
  ASSERT_EQ(run(base + " --threads 2 --deterministic train"), 0);
  EXPECT_EQ(file_hash(dir_ / "run" / "checkpoint.json"), first);
  EXPECT_TRUE(fs::exists(dir_ / "run" / "checkpoint_best.json"));
  EXPECT_EQ(lines(dir_ / "run" / "loss_curve.csv"), 3u);
  EXPECT_EQ(read(dir_ / "run" / "loss_curve.csv").substr(0, 25), "epoch,train_loss,val_loss");

  ASSERT_EQ(run(base + " evaluate"), 0);
  const json metrics = json::parse(read(dir_ / "run" / "metrics.json"));
  for (const char* col : {"train", "validation", "baseline validation", "test", "baseline test"}) {
    EXPECT_TRUE(metrics.at("reports").contains(col)) << col;
  }
  EXPECT_EQ(metrics.at("checkpoint").at("selection"), "final");
  EXPECT_NE(read(dir_ / "run" / "metrics.txt").find("RMSE [%]"), std::string::npos);

  // a one-window input assembled from the simulated data
  const nn::ModelCheckpoint model = load_checkpoint(dir_ / "run" / "checkpoint.json");
  json input;
  input["accel"] = json::array();
  input["gyro"] = json::array();
  {
    std::ifstream imu(dir_ / "run" / "imu.csv");
    std::string line;
    std::getline(imu, line);
    for (int k = 0; k < 100 && std::getline(imu, line); ++k) {
      std::vector<double> v;
      std::stringstream ss(line);
      std::string field;
      while (std::getline(ss, field, ',')) v.push_back(std::stod(field));
      input["accel"].push_back({v[1], v[2], v[3]});
      input["gyro"].push_back({v[4], v[5], v[6]});
    }
  }
  input["partial_beams"] = {0.3, -0.2};
  std::ofstream(dir_ / "input.json") << input.dump();
  ASSERT_EQ(run(base + " predict --input " + (dir_ / "input.json").string()), 0);
  const std::string out1 = read(dir_ / "stdout.txt");
  ASSERT_EQ(run(base + " predict --input " + (dir_ / "input.json").string()), 0);
  EXPECT_EQ(read(dir_ / "stdout.txt"), out1);
  const json pred = json::parse(out1);
  const auto reg = pred.at("regressed_beams_mps").get<std::vector<double>>();
  const auto vel = pred.at("velocity_mps").get<std::vector<double>>();
  for (double b : reg) {
    EXPECT_TRUE(std::isfinite(b));
    EXPECT_LT(std::abs(b), 10.0 * 2.0);
  }
  const VelocityEstimate est = solve_with_regressed(Vec2(0.3, -0.2), Vec2(reg[0], reg[1]),
                                                    BeamMask::with_missing({2, 4}), BeamGeometry().h());
  for (int i = 0; i < 3; ++i) EXPECT_EQ(est.v_body_mps(i), vel[static_cast<std::size_t>(i)]);

  std::ofstream(dir_ / "bad.json") << R"({"accel": [[1,2,3]], "gyro": [], "partial_beams": [0, 0]})";
  EXPECT_EQ(run(base + " predict --input " + (dir_ / "bad.json").string()), 2);

  const fs::path other = write_config("other.json", R"({"missing_beams": [1, 3]})");
  EXPECT_EQ(run("--config " + other.string() + " --out " + (dir_ / "run").string() + " evaluate"), 2);
  EXPECT_NE(read(dir_ / "stderr.txt").find("missing beams"), std::string::npos);
}

TEST_F(Cli, BestCheckpointBeatsMeanBeamBaseline) {
  const fs::path cfg = write_config("c.json", R"({"simulation": {"duration_s": 600, "test_duration_s": 300},
    "training": {"epochs": 15, "lr": 0.001}})");
  for (int seed = 1; seed <= 3; ++seed) {
    const fs::path out = dir_ / "s";
    const std::string base = "--config " + cfg.string() + " --seed " + std::to_string(seed) + " --out " + out.string();
    ASSERT_EQ(run(base + " simulate"), 0);
    ASSERT_EQ(run(base + " train"), 0);
    ASSERT_EQ(run(base + " evaluate --checkpoint " + (out / "checkpoint_best.json").string()), 0);
    const json m = json::parse(read(out / "metrics.json"));
    EXPECT_EQ(m.at("checkpoint").at("selection"), "best_validation");
    EXPECT_LT(m.at("reports").at("test").at("rmse_mps").get<double>(),
              m.at("reports").at("baseline test").at("rmse_mps").get<double>())
        << "seed " << seed;
    EXPECT_LT(m.at("reports").at("train").at("rmse_mps").get<double>(),
              m.at("reports").at("test").at("rmse_mps").get<double>())
        << "seed " << seed;
  }
}
