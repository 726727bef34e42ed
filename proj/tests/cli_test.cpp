// Copyright 2026 The AENR Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Drives the aenr executable end to end.

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "aenr/sim.hpp"
#include "aenr/wav.hpp"
#include "test_util.hpp"

namespace aenr {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code;
  std::string err;
};

Run cli(const std::string& args, const fs::path& dir, const std::string& env = "") {
  const auto err = dir / "stderr.txt";
  const std::string cmd = env + " " + AENR_CLI_PATH + " " + args + " >/dev/null 2>" + err.string();
  const int status = std::system(cmd.c_str());
  std::ifstream is(err);
  std::stringstream ss;
  ss << is.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream is(p);
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

TEST(Cli, SimulateIsByteIdentical) {
  auto dir = testing::temp_dir("cli_sim");
  write_text(dir / "dt.cfg", "kind = DT\nseed = 7\nduration_s = 3\n");
  ASSERT_EQ(cli("simulate --spec " + (dir / "dt.cfg").string() + " --out-dir " + (dir / "a").string(), dir).code, 0);
  ASSERT_EQ(cli("simulate --spec " + (dir / "dt.cfg").string() + " --out-dir " + (dir / "b").string(), dir).code, 0);
  for (const char* f : {"mic.wav", "near.wav", "echo.wav", "noise.wav", "farend.wav", "manifest.txt"}) {
    ASSERT_TRUE(fs::exists(dir / "a" / f)) << f;
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  }
  auto mic = read_wav(dir / "a" / "mic.wav").samples, s = read_wav(dir / "a" / "near.wav").samples,
       e = read_wav(dir / "a" / "echo.wav").samples, v = read_wav(dir / "a" / "noise.wav").samples;
  ASSERT_EQ(mic.size(), 48000u);
  for (std::size_t n = 0; n < mic.size(); ++n) ASSERT_NEAR(mic[n], s[n] + e[n] + v[n], 1e-7);
}

TEST(Cli, NearEndSingleTalkHasSilentEcho) {
  auto dir = testing::temp_dir("cli_nst");
  write_text(dir / "nst.cfg", "kind = NST\nduration_s = 2\n");
  ASSERT_EQ(cli("simulate --spec " + (dir / "nst.cfg").string() + " --out-dir " + (dir / "o").string(), dir).code, 0);
  for (double x : read_wav(dir / "o" / "echo.wav").samples) ASSERT_EQ(x, 0.0);
}

TEST(Cli, RequestedSerIsMeasuredFromFiles) {
  auto dir = testing::temp_dir("cli_ser");
  write_text(dir / "s.cfg", "kind = DT\nser_db = 5\nsnr_db = 15\nduration_s = 5\nseed = 9\n");
  ASSERT_EQ(cli("simulate --spec " + (dir / "s.cfg").string() + " --out-dir " + (dir / "o").string(), dir).code, 0);
  auto s = read_wav(dir / "o" / "near.wav").samples, e = read_wav(dir / "o" / "echo.wav").samples;
  EXPECT_NEAR(10 * std::log10(active_power(s, 16000) / active_power(e, 16000)), 5.0, 0.1);
}

TEST(Cli, InvalidSpecIsConfigError) {
  auto dir = testing::temp_dir("cli_badspec");
  write_text(dir / "s.cfg", "kind = DT\nser_db = 50\n");
  auto r = cli("simulate --spec " + (dir / "s.cfg").string() + " --out-dir " + (dir / "o").string(), dir);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("ser_db"), std::string::npos);
  EXPECT_EQ(cli("simulate --spec " + (dir / "none.cfg").string() + " --out-dir " + (dir / "o").string(), dir).code, 3);
}

class CliScenarios : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = testing::temp_dir("cli_eval");
    for (int i = 1; i <= 2; ++i) {
      const auto spec = dir_ / ("dt" + std::to_string(i) + ".cfg");
      write_text(spec, "kind = DT\nduration_s = 4\nseed = " + std::to_string(i) + "\n");
      ASSERT_EQ(cli("simulate --spec " + spec.string() + " --out-dir " + (dir_ / "scen" / ("dt" + std::to_string(i))).string(),
                    dir_)
                    .code,
                0);
    }
  }
  static fs::path dir_;
};

fs::path CliScenarios::dir_;

TEST_F(CliScenarios, EvalOrderingAndDeterminism) {
  const std::string args = "eval --scenarios " + (dir_ / "scen").string() + " --estimators identity,oracle --report ";
  ASSERT_EQ(cli(args + (dir_ / "r1.csv").string(), dir_).code, 0);
  ASSERT_EQ(cli(args + (dir_ / "r2.csv").string(), dir_).code, 0);
  auto a = read_csv(dir_ / "r1.csv"), b = read_csv(dir_ / "r2.csv");
  ASSERT_EQ(a.size(), 5u);
  EXPECT_EQ(a[0], (std::vector<std::string>{"scenario", "estimator", "erle_db", "si_sdr_db", "seg_snr_db", "rtf"}));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t r = 0; r < a.size(); ++r) {
    ASSERT_EQ(a[r].size(), 6u);
    for (std::size_t c = 0; c < 5; ++c) EXPECT_EQ(a[r][c], b[r][c]) << r << "," << c;
  }
  for (std::size_t r = 1; r < a.size(); r += 2) {
    ASSERT_EQ(a[r][1], "identity");
    ASSERT_EQ(a[r + 1][1], "oracle");
    EXPECT_EQ(a[r][0], a[r + 1][0]);
    EXPECT_GT(std::stod(a[r + 1][3]), std::stod(a[r][3]));
    EXPECT_GT(std::stod(a[r][5]), 0.0);
  }
}

TEST_F(CliScenarios, EvalAcceptsSpecFiles) {
  ASSERT_EQ(cli("eval --scenarios " + (dir_ / "dt1.cfg").string() + " --estimators wiener --report " +
                    (dir_ / "spec.csv").string(),
                dir_)
                .code,
            0);
  auto rows = read_csv(dir_ / "spec.csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1][1], "wiener");
}

TEST_F(CliScenarios, EvalMissingWeightsIsConfigError) {
  auto r = cli("eval --scenarios " + (dir_ / "scen").string() + " --estimators neural:" + (dir_ / "none.bin").string() +
                   " --report " + (dir_ / "x.csv").string(),
               dir_);
  EXPECT_EQ(r.code, 2);
}

TEST_F(CliScenarios, ProcessWritesOutputAndMetrics) {
  const auto sc = dir_ / "scen" / "dt1";
  auto r = cli("process --mic " + (sc / "mic.wav").string() + " --farend " + (sc / "farend.wav").string() + " --near " +
                   (sc / "near.wav").string() + " --out " + (dir_ / "out.wav").string() + " --estimator oracle --metrics " +
                   (dir_ / "m.csv").string() + " --kf-diag " + (dir_ / "kf.csv").string(),
               dir_);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("latency 256 samples"), std::string::npos);
  auto out = read_wav(dir_ / "out.wav");
  EXPECT_EQ(out.samples.size(), read_wav(sc / "mic.wav").samples.size());
  auto m = read_csv(dir_ / "m.csv");
  ASSERT_EQ(m.size(), 4u);
  EXPECT_EQ(m[0], (std::vector<std::string>{"scenario", "estimator", "metric", "value"}));
  EXPECT_EQ(m[2][2], "si_sdr_db");
  EXPECT_GE(std::stod(m[2][3]), 15.0);
  EXPECT_GT(read_csv(dir_ / "kf.csv").size(), 200u);
}

TEST_F(CliScenarios, ProcessVerboseLogsPerSecond) {
  const auto sc = dir_ / "scen" / "dt2";
  auto r = cli("process -v --mic " + (sc / "mic.wav").string() + " --farend " + (sc / "farend.wav").string() +
                   " --out " + (dir_ / "v.wav").string(),
               dir_);
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("[   1.01 s]"), std::string::npos) << r.err;
}

TEST(Cli, EmptyScenarioListWritesHeader) {
  auto dir = testing::temp_dir("cli_empty");
  fs::create_directories(dir / "none");
  ASSERT_EQ(cli("eval --report " + (dir / "r.csv").string(), dir).code, 0);
  EXPECT_EQ(slurp(dir / "r.csv"), "scenario,estimator,erle_db,si_sdr_db,seg_snr_db,rtf\n");
  ASSERT_EQ(cli("eval --scenarios " + (dir / "none").string() + " --report " + (dir / "r2.csv").string(), dir).code, 0);
  EXPECT_EQ(slurp(dir / "r2.csv"), slurp(dir / "r.csv"));
}

TEST(Cli, ProcessErrors) {
  auto dir = testing::temp_dir("cli_err");
  auto x = testing::gaussian(16000, 1, 0.1);
  write_wav(dir / "x.wav", Audio{x, 16000.0});
  write_wav(dir / "empty.wav", Audio{{}, 16000.0});
  write_wav(dir / "r8k.wav", Audio{x, 8000.0});
  write_text(dir / "bad.cfg", "features.alpha = 7\n");
  const std::string x_wav = (dir / "x.wav").string(), out = " --out " + (dir / "o.wav").string();

  EXPECT_EQ(cli("process --mic " + (dir / "missing.wav").string() + " --farend " + x_wav + out, dir).code, 3);
  EXPECT_EQ(cli("process --mic " + x_wav + " --farend " + x_wav + out + " --config " + (dir / "bad.cfg").string(), dir).code,
            2);
  EXPECT_EQ(cli("process --mic " + x_wav + " --farend " + x_wav + out + " --config " + (dir / "nocfg.cfg").string(), dir).code,
            3);
  auto r = cli("process --mic " + (dir / "empty.wav").string() + " --farend " + (dir / "empty.wav").string() + out, dir);
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("zero-length"), std::string::npos);
  EXPECT_EQ(cli("process --mic " + (dir / "r8k.wav").string() + " --farend " + x_wav + out, dir).code, 2);
  EXPECT_EQ(cli("process --mic " + x_wav + " --farend " + x_wav + out + " --estimator bogus", dir).code, 2);
  EXPECT_EQ(cli("process --mic " + x_wav, dir).code, 2);
  EXPECT_EQ(cli("nonsense", dir).code, 2);
  EXPECT_EQ(cli("process --mic " + x_wav + " --farend " + x_wav + " --out /nonexistent/dir/o.wav", dir).code, 3);
}

TEST(Cli, UnequalLengthsArePadded) {
  auto dir = testing::temp_dir("cli_pad");
  write_wav(dir / "mic.wav", Audio{testing::gaussian(16000, 2, 0.1), 16000.0});
  write_wav(dir / "far.wav", Audio{testing::gaussian(12000, 3, 0.1), 16000.0});
  auto r = cli("process --mic " + (dir / "mic.wav").string() + " --farend " + (dir / "far.wav").string() + " --out " +
                   (dir / "o.wav").string(),
               dir);
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  EXPECT_EQ(read_wav(dir / "o.wav").samples.size(), 16000u);
}

TEST(Cli, ConfigFromEnvironment) {
  auto dir = testing::temp_dir("cli_env");
  write_text(dir / "env.cfg", "kalman.partitions = 4\n");
  auto r = cli("print-config", dir, "AENR_CONFIG=" + (dir / "env.cfg").string());
  EXPECT_EQ(r.code, 0);
  const auto outfile = dir / "printed.txt";
  std::system(("AENR_CONFIG=" + (dir / "env.cfg").string() + " " + AENR_CLI_PATH + " print-config > " + outfile.string())
                  .c_str());
  EXPECT_NE(slurp(outfile).find("kalman.partitions = 4"), std::string::npos);
  write_text(dir / "broken.cfg", "kalman.partitions = zero\n");
  EXPECT_EQ(cli("print-config", dir, "AENR_CONFIG=" + (dir / "broken.cfg").string()).code, 2);
}

TEST(Cli, InitWeightsThenNeuralProcess) {
  auto dir = testing::temp_dir("cli_neural");
  ASSERT_EQ(cli("init-weights --out " + (dir / "w.bin").string() + " --seed 4", dir).code, 0);
  write_wav(dir / "x.wav", Audio{testing::gaussian(8000, 5, 0.1), 16000.0});
  const std::string x = (dir / "x.wav").string();
  EXPECT_EQ(cli("process --mic " + x + " --farend " + x + " --out " + (dir / "o.wav").string() + " --estimator neural:" +
                    (dir / "w.bin").string(),
                dir)
                .code,
            0);
  ASSERT_EQ(cli("init-weights --out " + (dir / "small.bin").string() + " --hidden 8", dir).code, 0);
  EXPECT_EQ(cli("process --mic " + x + " --farend " + x + " --out " + (dir / "o.wav").string() + " --estimator neural:" +
                    (dir / "small.bin").string(),
                dir)
                .code,
            0);
}

}  // namespace
}  // namespace aenr
