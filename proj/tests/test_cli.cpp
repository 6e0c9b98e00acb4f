//
// catspin - Copyright 2026 The catspin Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct CliRun {
  int code;
  std::string out;
};

CliRun run(const std::string &args, const std::string &env = "") {
  const std::string prefix = env.empty() ? "" : "env " + env + " ";
  const std::string cmd = prefix + CATSPIN_CLI_PATH + " " + args + " 2>/dev/null";
  FILE *pipe = ::popen(cmd.c_str(), "r");
  if (!pipe)
    return {-1, {}};
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe))
    out.append(buf.data(), n);
  const int status = ::pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

class CliTest : public ::testing::Test {
protected:
  void SetUp() override {
    static int counter = 0;
    dir_ = fs::temp_directory_path() /
           ("catspin_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(dir_);
  }
  void TearDown() override {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }
  std::string path(const std::string &name) const { return (dir_ / name).string(); }
  static std::string slurp(const std::string &p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

TEST_F(CliTest, HelpAndUsageErrors) {
  EXPECT_EQ(run("--help").code, 0);
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("frobnicate").code, 1);
  EXPECT_EQ(run("optimize --theta 1").code, 1);
  EXPECT_EQ(run("optimize --n-atoms 0 --theta 1 --n-pulses 1").code, 1);
  EXPECT_EQ(run("optimize --n-atoms 4 --theta nonsense --n-pulses 1").code, 1);
  EXPECT_EQ(run("protocol").code, 1);
}

TEST_F(CliTest, OptimizeTrivialTarget) {
  const CliRun r = run("optimize --n-atoms 2 --theta 0 --n-pulses 1 --restarts 2");
  ASSERT_EQ(r.code, 0);
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["schema_version"], 1);
  EXPECT_EQ(doc["n_atoms"], 2);
  EXPECT_EQ(doc["mode"], "free");
  EXPECT_LT(doc["infidelity"].get<double>(), 1e-10);
  EXPECT_EQ(doc["sequence"].size(), 1u);
}

TEST_F(CliTest, OptimizeIsDeterministic) {
  const std::string args = "optimize --n-atoms 8 --theta 0.5pi --n-pulses 2 --restarts 3 --max-iterations 60 --seed 9";
  const CliRun a = run(args + " --workers 1");
  const CliRun b = run(args + " --workers 2");
  EXPECT_EQ(a.code, b.code);
  EXPECT_EQ(a.out, b.out);
  EXPECT_FALSE(a.out.empty());
}

TEST_F(CliTest, OptimizeFixedBudgetWritesFile) {
  const std::string out = path("seq.json");
  const CliRun r = run("optimize --n-atoms 10 --theta 0.8pi --n-pulses 2 --q-tilde 1 --restarts 2 "
                    "--max-iterations 100 --out " + out);
  ASSERT_TRUE(r.code == 0 || r.code == 2);
  const json doc = json::parse(slurp(out));
  EXPECT_EQ(doc["mode"], "fixed_budget");
  double total = 0;
  for (const auto &p : doc["sequence"])
    total += p["Q"].get<double>();
  EXPECT_NEAR(std::sqrt(10.0) * total, 1.0, 1e-12);
}

TEST_F(CliTest, RamseyIsZeroDecibels) {
  const CliRun r = run("protocol --ramsey --n-atoms 50");
  ASSERT_EQ(r.code, 0);
  const json doc = json::parse(r.out);
  EXPECT_NEAR(doc["gain_db"].get<double>(), 0.0, 1e-6);
  EXPECT_NEAR(doc["gain_db_lossy"].get<double>(), 0.0, 1e-6);
  EXPECT_EQ(doc["loss_db"].get<double>(), 0.0);
}

TEST_F(CliTest, ProtocolFromOptimizedSequence) {
  const std::string seq = path("seq.json");
  ASSERT_NE(run("optimize --n-atoms 12 --theta 0.8pi --n-pulses 2 --q-tilde 1 --restarts 2 "
                "--max-iterations 150 --out " + seq).code, 1);
  const CliRun r = run("protocol --sequence " + seq);
  ASSERT_EQ(r.code, 0);
  const json doc = json::parse(r.out);
  EXPECT_NEAR(doc["q_tilde"].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(doc["loss_db"].get<double>(), 6.2537, 1e-3);
  EXPECT_NEAR(doc["gain_db_lossy"].get<double>(),
              doc["gain_db_lossless"].get<double>() - doc["loss_db"].get<double>(), 1e-9);
  EXPECT_EQ(run("protocol --sequence " + seq + " --n-atoms 13").code, 1);
}

TEST_F(CliTest, CorruptSequenceFileIsUsageError) {
  const std::string bad = path("bad.json");
  std::ofstream(bad) << "{\"n_atoms\": 4, \"sequence\": [{\"Q\": 1}]}";
  EXPECT_EQ(run("protocol --sequence " + bad).code, 1);
  std::ofstream(bad, std::ios::trunc) << "not json";
  EXPECT_EQ(run("protocol --sequence " + bad).code, 1);
  EXPECT_EQ(run("protocol --sequence " + path("missing.json")).code, 1);
}

TEST_F(CliTest, HusimiCsv) {
  const std::string out = path("q.csv");
  ASSERT_EQ(run("husimi --cat-theta 0.5pi --n-atoms 6 --n-theta 21 --n-phi 41 --out " + out).code, 0);
  std::istringstream in(slurp(out));
  std::string line;
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#')
      ++rows;
  EXPECT_EQ(rows, 1 + 21 * 41);
  EXPECT_EQ(run("husimi --cat-theta 0.5pi --n-atoms 6 --n-theta 1").code, 1);
  EXPECT_EQ(run("husimi --n-atoms 6").code, 1);
}

TEST_F(CliTest, SweepResumeAndFit) {
  const std::string cfg = path("sweep.ini");
  const std::string out = path("out");
  std::ofstream(cfg) << "schema_version = 1\n[grid]\nn_atoms = 4, 6, 8\ntheta = 0.8pi\nn_pulses = 2\n"
                        "[optimizer]\nrestarts = 1\nmax_iterations = 40\n[output]\nworkers = 2\n";
  ASSERT_EQ(run("sweep " + cfg + " --output-dir " + out).code, 0);
  const std::string records = out + "/records.csv";
  const std::string first = slurp(records);
  ASSERT_EQ(run("sweep " + cfg + " --output-dir " + out).code, 0);
  EXPECT_EQ(slurp(records), first);
  EXPECT_TRUE(fs::exists(out + "/fits.json"));

  const CliRun fit = run("fit --records " + records + " --gamma 0.36");
  ASSERT_EQ(fit.code, 0);
  const json doc = json::parse(fit.out);
  ASSERT_EQ(doc["cells"].size(), 1u);
  EXPECT_EQ(doc["cells"][0]["selected"], "lossy");
}

TEST_F(CliTest, SweepRejectsBadConfig) {
  const std::string cfg = path("bad.ini");
  std::ofstream(cfg) << "schema_version = 1\n[grid]\nunknown = 3\n";
  EXPECT_EQ(run("sweep " + cfg + " --output-dir " + path("o")).code, 1);
  EXPECT_EQ(run("sweep " + path("absent.ini")).code, 1);
}

TEST_F(CliTest, SweepWorkerEnvironmentOverride) {
  const std::string out = path("env");
  const std::string args = "sweep --n-atoms 4,6,8 --theta 0.2pi --n-pulses 1 --restarts 1 "
                           "--max-iterations 20 --format json --output-dir " + out;
  EXPECT_EQ(run(args, "CATSPIN_WORKERS=bogus").code, 1);
  ASSERT_EQ(run(args, "CATSPIN_WORKERS=1").code, 0);
  std::istringstream in(slurp(out + "/records.jsonl"));
  int rows = 0;
  for (std::string line; std::getline(in, line);)
    rows += !line.empty();
  EXPECT_EQ(rows, 3);
}

TEST_F(CliTest, FitNeedsEnoughSizes) {
  const std::string out = path("few");
  ASSERT_EQ(run("sweep --n-atoms 4,6 --theta 0.2pi --n-pulses 1 --restarts 1 --max-iterations 20 "
                "--output-dir " + out).code, 0);
  EXPECT_EQ(run("fit --records " + out + "/records.csv").code, 2);
}

}  // namespace
