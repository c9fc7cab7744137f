#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <gtest/gtest.h>

#include "commands.hpp"
#include "config.hpp"
#include "statrcm/error.hpp"

namespace {

using namespace statrcm;
using namespace statrcm::cli;
namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int run_args(std::vector<std::string> args) {
  args.insert(args.begin(), "statrcm");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run(static_cast<int>(argv.size()), argv.data());
}

class CliRun : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("statrcm_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
    std::ofstream(dir_ / "run.ini") << "[estimation]\nn_starts = 1\n[simulation]\nn_paths = 200\ntrajectories = 5\n";
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path dir_;
};

TEST(Config, RoundTrip) {
  const fs::path p = fs::temp_directory_path() / ("statrcm_cfg_" + std::to_string(::getpid()) + ".ini");
  RunConfig c;
  c.form = model::ForcingForm::Log2;
  c.setup = simulate::UncertaintySetup::ParamState;
  c.n_paths = 1234;
  c.threshold = 1.75;
  c.window_first = 2030;
  c.start_from_smoothed = true;
  c.out_dir = "/tmp/x";
  write_config(c, p);
  const RunConfig back = load_config(p);
  EXPECT_EQ(back.form, c.form);
  EXPECT_EQ(back.setup, c.setup);
  EXPECT_EQ(back.n_paths, c.n_paths);
  EXPECT_EQ(back.threshold, c.threshold);
  EXPECT_EQ(back.window_first, c.window_first);
  EXPECT_FALSE(back.window_last.has_value());
  EXPECT_TRUE(back.start_from_smoothed);
  EXPECT_EQ(back.out_dir, c.out_dir);
  fs::remove(p);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  const fs::path p = fs::temp_directory_path() / ("statrcm_bad_" + std::to_string(::getpid()) + ".ini");
  std::ofstream(p) << "[simulation]\nn_pahts = 10\n";
  EXPECT_THROW(load_config(p), ConfigError);
  std::ofstream(p) << "[simulation]\nthreshold = warm\n";
  EXPECT_THROW(load_config(p), ConfigError);
  std::ofstream(p) << "[model]\nform = cubic\n";
  EXPECT_THROW(load_config(p), ConfigError);
  fs::remove(p);
  RunConfig c;
  c.n_paths = 0;
  EXPECT_THROW(validate_config(c), ConfigError);
}

TEST_F(CliRun, ZeroPathsIsAConfigError) {
  EXPECT_EQ(run_args({"project", "--config", (dir_ / "run.ini").string(), "--out", (dir_ / "o").string(), "--paths", "0"}), 2);
}

TEST_F(CliRun, UnknownCommandFails) {
  EXPECT_NE(run_args({"forecast", "--out", (dir_ / "o").string()}), 0);
}

TEST_F(CliRun, EstimateIsByteIdenticalAcrossRuns) {
  const std::string cfg = (dir_ / "run.ini").string();
  ASSERT_EQ(run_args({"estimate", "--config", cfg, "--out", (dir_ / "a").string()}), 0);
  ASSERT_EQ(run_args({"estimate", "--config", cfg, "--out", (dir_ / "b").string(), "--threads", "2"}), 0);
  for (const char* f : {"estimates.csv", "params.json", "summary.json"}) {
    ASSERT_TRUE(fs::exists(dir_ / "a" / f)) << f;
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
  }
  EXPECT_TRUE(fs::exists(dir_ / "a" / "config.ini"));

  const StoredFit fit = load_params_json(dir_ / "a" / "params.json");
  EXPECT_EQ(fit.free_ids.size(), 31u);
  ASSERT_TRUE(fit.cov.has_value());
  EXPECT_EQ(fit.cov->rows(), 31);

  // the stored fit drives later commands without re-estimating
  std::ofstream(dir_ / "proj.ini") << "[model]\nparams = a/params.json\n[simulation]\nn_paths = 100\ntrajectories = 3\n";
  ASSERT_EQ(run_args({"project", "--config", (dir_ / "proj.ini").string(), "--out", (dir_ / "p").string()}), 0);
  EXPECT_TRUE(fs::exists(dir_ / "p" / "projection_bands.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "p" / "exceedance.json"));
  ASSERT_EQ(run_args({"smooth", "--config", (dir_ / "proj.ini").string(), "--out", (dir_ / "s").string()}), 0);
  ASSERT_EQ(run_args({"diagnose", "--config", (dir_ / "proj.ini").string(), "--out", (dir_ / "d").string()}), 0);
  EXPECT_TRUE(fs::exists(dir_ / "d" / "diagnostics.csv"));
}

TEST_F(CliRun, SelectPutsUnrestrictedOnTop) {
  ASSERT_EQ(run_args({"select", "--config", (dir_ / "run.ini").string(), "--out", (dir_ / "sel").string()}), 0);
  std::ifstream in(dir_ / "sel" / "model_comparison.csv");
  std::string line;
  std::getline(in, line);
  double top = 0.0;
  std::vector<double> logliks;
  while (std::getline(in, line)) {
    std::stringstream ss(line);
    std::string form, k, ll;
    std::getline(ss, form, ',');
    std::getline(ss, k, ',');
    std::getline(ss, ll, ',');
    if (form == "unrestricted") top = std::stod(ll);
    logliks.push_back(std::stod(ll));
  }
  ASSERT_EQ(logliks.size(), 6u);
  for (double ll : logliks) EXPECT_LE(ll, top + 1e-4);
}

}  // namespace
