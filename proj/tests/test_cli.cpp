#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include <fmt/format.h>
#include <gtest/gtest.h>

#include "tactile/io/output.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kConfigDir = fs::path(TACTILE_SOURCE_DIR) / "config";

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / fmt::format("tactile_cli_{}_{}", ::getpid(), counter_++);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int cli(const std::string& args) const {
    const std::string cmd = fmt::format("'{}' {} >'{}' 2>&1", TACTILE_CLI, args, (dir_ / "stdout.txt").string());
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }
  std::string out() const { return read(dir_ / "stdout.txt"); }
  static std::string read(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
    return dir_ / name;
  }
  std::size_t entries(const fs::path& p) const {
    return std::distance(fs::directory_iterator(p), fs::directory_iterator());
  }

  fs::path dir_;
  static inline int counter_ = 0;
};

std::vector<std::vector<double>> parse_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::stringstream ss(text);
  std::string line;
  std::getline(ss, line);
  while (std::getline(ss, line)) {
    std::vector<double> r;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) r.push_back(std::stod(cell));
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

TEST_F(CliTest, RunWritesCsvAndSidecar) {
  ASSERT_EQ(cli(fmt::format("run '{}' --out-dir '{}'", (kConfigDir / "follow_ramp.yaml").string(), dir_.string())), 0)
      << out();
  const auto rows = parse_csv(read(dir_ / "follow_ramp_seed1.csv"));
  const auto meta = nlohmann::json::parse(read(dir_ / "follow_ramp_seed1.json"));
  EXPECT_EQ(meta["termination"], "completed");
  EXPECT_EQ(meta["steps"].get<std::size_t>(), rows.size());
  // One row per control step at the configured rate.
  for (std::size_t i = 1; i < rows.size(); ++i) ASSERT_NEAR(rows[i][0] - rows[i - 1][0], 1.0 / 30, 1e-12);
}

TEST_F(CliTest, RunIsByteIdenticalUnderSeed) {
  for (const char* f : {"follow_ramp.yaml", "push_dual.yaml"}) {
    const auto cfg = (kConfigDir / f).string();
    ASSERT_EQ(cli(fmt::format("run '{}' --seed 7 --out-dir '{}/a'", cfg, dir_.string())), 0);
    ASSERT_EQ(cli(fmt::format("run '{}' --seed 7 --out-dir '{}/b'", cfg, dir_.string())), 0);
    ASSERT_EQ(cli(fmt::format("run '{}' --seed 8 --out-dir '{}/c'", cfg, dir_.string())), 0);
  }
  for (const auto& e : fs::directory_iterator(dir_ / "a")) {
    const auto name = e.path().filename();
    EXPECT_EQ(read(e.path()), read(dir_ / "b" / name)) << name;
    if (name.extension() == ".csv") {
      std::string other = name.string();
      other.replace(other.find("seed7"), 5, "seed8");
      EXPECT_NE(read(e.path()), read(dir_ / "c" / other));
    }
  }
  EXPECT_EQ(entries(dir_ / "a"), 4u);
}

TEST_F(CliTest, BadConfigExitsOneWithLine) {
  const auto p = write("bad.yaml", fmt::format("task: follow_ramp\ncontroller: {}\nsigma_phi_mm_deg: 0\n",
                                               (kConfigDir / "controllers" / "ramp_following.yaml").string()));
  EXPECT_EQ(cli(fmt::format("run '{}' --out-dir '{}/o'", p.string(), dir_.string())), 1);
  EXPECT_NE(out().find("bad.yaml:3:19"), std::string::npos) << out();
  EXPECT_FALSE(fs::exists(dir_ / "o"));
  EXPECT_EQ(cli("run /no/such/file.yaml"), 1);
  EXPECT_EQ(cli("frobnicate"), 1);
  EXPECT_EQ(cli("gen-dataset --n 0 --out x.csv"), 1);
  EXPECT_EQ(cli("filter-sweep --levels 1 -2"), 1);
}

TEST_F(CliTest, AbortedRunExitsTwo) {
  write("fast.yaml", "servo:\n  kp: [0, 0, 2, 2, 2, 0]\n  ki: [0, 0, 0, 0, 0, 0]\n  kd: [0, 0, 0, 0, 0, 0]\n"
                     "  reference_pose_mm_deg: [0, 0, 3, 0, 0, 0]\n  feedforward_mm_s_deg_s: [0, 200, 0, 0, 0, 0]\n");
  const auto p = write("run.yaml", "task: follow_ramp\ncontroller: fast.yaml\nworkspace_limit_mm: 300\noutput_dir: out\n");
  EXPECT_EQ(cli(fmt::format("run '{}'", p.string())), 2) << out();
  const auto meta = nlohmann::json::parse(read(dir_ / "out" / "follow_ramp_seed1.json"));
  EXPECT_EQ(meta["aborted"], true);
  EXPECT_EQ(meta["termination"], "workspace_exceeded");
}

TEST_F(CliTest, ValidateOnlyHasNoSideEffects) {
  for (const char* f : {"track.yaml", "follow_ramp.yaml", "follow_hemisphere.yaml", "push_single.yaml", "push_dual.yaml"}) {
    EXPECT_EQ(cli(fmt::format("run '{}' --validate-only --out-dir '{}/o'", (kConfigDir / f).string(), dir_.string())), 0);
  }
  EXPECT_EQ(cli(fmt::format("gen-dataset --n 10 --out '{}/d.csv' --validate-only", dir_.string())), 0);
  EXPECT_EQ(cli(fmt::format("filter-sweep --out '{}/s.csv' --validate-only", dir_.string())), 0);
  EXPECT_EQ(entries(dir_), 1u);  // stdout capture only
}

TEST_F(CliTest, GenDatasetRowsEnvelopeAndRadius) {
  const auto csv = dir_ / "data.csv";
  ASSERT_EQ(cli(fmt::format("gen-dataset --n 6000 --out '{}' --seed 3", csv.string())), 0);
  const std::string text = read(csv);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 6001);
  const auto rows = parse_csv(text);
  double mean_r = 0;
  for (const auto& r : rows) {
    const double radius = std::hypot(r[0], r[1]);
    mean_r += radius;
    ASSERT_LE(radius, 5.0);
    ASSERT_GE(r[2], 0.5);
    ASSERT_LE(r[2], 6.0);
    const double deg = std::acos(-1.0) / 180;
    ASSERT_LE(std::acos(std::cos(r[3] * deg) * std::cos(r[4] * deg)), 25.0 * deg + 1e-12);  // cap half-angle
    ASSERT_LE(std::abs(r[5]), 5.0);
  }
  mean_r /= rows.size();
  EXPECT_NEAR(mean_r, 2.0 / 3.0 * 5.0, 0.01 * 2.0 / 3.0 * 5.0);
  EXPECT_TRUE(fs::exists(dir_ / "data.json"));
  EXPECT_EQ(cli(fmt::format("gen-dataset --n 5 --out '{}/missing/x.csv'", dir_.string())), 1);
}

TEST_F(CliTest, FilterSweepTrendAndDegenerateLevel) {
  const auto csv = dir_ / "sweep.csv";
  ASSERT_EQ(cli(fmt::format("filter-sweep --levels 10 1 0.1 0.01 --seed 2 --out '{}'", csv.string())), 0);
  const auto rows = parse_csv(read(csv));
  ASSERT_EQ(rows.size(), 4u);
  for (int c = 0; c < 6; ++c) {
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LT(rows[i][7 + c], rows[i - 1][7 + c]) << c;
  }
  ASSERT_EQ(cli(fmt::format("filter-sweep --levels 1e6 --seed 2 --out '{}'", csv.string())), 0);
  const auto wide = parse_csv(read(csv));
  for (int c = 0; c < 6; ++c) EXPECT_NEAR(wide[0][7 + c], wide[0][1 + c], 0.05 * wide[0][1 + c]);
  const std::string first = read(csv);
  ASSERT_EQ(cli(fmt::format("filter-sweep --levels 1e6 --seed 2 --out '{}'", csv.string())), 0);
  EXPECT_EQ(read(csv), first);
}
