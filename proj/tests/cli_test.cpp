#include <gtest/gtest.h>

#include <cstdio>
#include <sstream>

#include "commands.hpp"
#include "sparsescan/metrics.hpp"
#include "sparsescan/pipeline.hpp"
#include "sparsescan/saliency.hpp"
#include "support/synthetic_em.hpp"
#include "support/temp_dir.hpp"

namespace sparsescan {
namespace {

namespace fs = std::filesystem;
using testing::read_bytes;
using testing::read_text;
using testing::TempDir;
using testing::write_bytes;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "sparsescan");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(read_text(path));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    save_image(testing::synthetic_em(48, 48, 3), dir_ / "hr.pgm");
    write_bytes(dir_ / "run.cfg", "hr_path = hr.pgm\ntile = 16\ntotal_scan_rate = 0.1\n");
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  TempDir dir_;
};

TEST_F(CliTest, ScanWritesArtifacts) {
  const auto r = invoke({"scan", "--config", path("run.cfg"), "--out-dir", path("out"), "--seed", "7"});
  ASSERT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_TRUE(r.err.empty());
  for (const char* name : {"out.pgm", "total_scan.pbm", "rescan.pbm", "report.csv", "summary.txt"}) {
    EXPECT_TRUE(fs::exists(dir_ / "out" / name)) << name;
  }
}

TEST_F(CliTest, ScanTwiceIsByteIdentical) {
  ASSERT_EQ(invoke({"scan", "--config", path("run.cfg"), "--out-dir", path("a"), "--seed", "7"}).code, 0);
  ASSERT_EQ(invoke({"scan", "--config", path("run.cfg"), "--out-dir", path("b"), "--seed", "7", "--threads", "3"}).code, 0);
  for (const char* name : {"out.pgm", "total_scan.pbm", "rescan.pbm", "report.csv"}) {
    EXPECT_EQ(read_bytes(dir_ / "a" / name), read_bytes(dir_ / "b" / name)) << name;
  }
}

TEST_F(CliTest, OverridesTakePrecedence) {
  ASSERT_EQ(invoke({"scan", "--config", path("run.cfg"), "--out-dir", path("o"), "--total_scan_rate", "0.0625"}).code, 0);
  const auto rows = read_csv(dir_ / "o" / "report.csv");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1][1], "16");
  EXPECT_EQ(rows[1][2], "0.0625");
}

TEST_F(CliTest, ScanWithoutConfigFileUsesFlags) {
  const auto r = invoke({"scan", "--hr_path", path("hr.pgm"), "--tile", "16", "--sampler", "random", "--out-dir", path("f")});
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST_F(CliTest, ExitCodes) {
  auto r = invoke({"scan", "--config", path("nope.cfg"), "--out-dir", path("x")});
  EXPECT_EQ(r.code, cli::kIo);
  EXPECT_NE(r.err.find("nope.cfg"), std::string::npos);
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);

  r = invoke({"scan", "--config", path("run.cfg"), "--total_scan_rate", "0.01", "--out-dir", path("x")});
  EXPECT_EQ(r.code, cli::kValidation);

  write_bytes(dir_ / "bad.cfg", "hr_path = hr.pgm\ncolour = red\n");
  r = invoke({"scan", "--config", path("bad.cfg")});
  EXPECT_EQ(r.code, cli::kValidation);
  EXPECT_NE(r.err.find("colour"), std::string::npos);

  EXPECT_EQ(invoke({"scan", "--bogus-flag"}).code, cli::kUsage);
  EXPECT_EQ(invoke({}).code, cli::kUsage);
  EXPECT_EQ(invoke({"frobnicate"}).code, cli::kUsage);
  EXPECT_EQ(invoke({"--help"}).code, cli::kOk);
}

TEST_F(CliTest, SweepWritesOneRowPerFactor) {
  const auto r = invoke({"sweep", "--config", path("run.cfg"), "--sampler", "topk", "--out-dir", path("s")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = read_csv(dir_ / "s" / "sweep.csv");
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[1][0], "3");
  EXPECT_EQ(rows[5][0], "13");
  EXPECT_EQ(invoke({"sweep", "--config", path("run.cfg"), "--factors", "20", "--out-dir", path("s2")}).code,
            cli::kValidation);
  EXPECT_EQ(invoke({"sweep", "--config", path("run.cfg"), "--factors", "3,x", "--out-dir", path("s3")}).code,
            cli::kValidation);
}

TEST_F(CliTest, SamplePrintsPopcountAndMeanSaliency) {
  write_emap(testing::saliency_blob(32, 32, 10, 12, 4, 1.0, 0.01), dir_ / "u.emap");
  auto r = invoke({"sample", "--emap", path("u.emap"), "--k", "40", "--tile", "16", "--out", path("b.pbm")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("popcount 40\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("mean_saliency "), std::string::npos);
  EXPECT_EQ(pbm_to_bitmap(dir_ / "b.pbm").popcount(), 40u);

  r = invoke({"sample", "--emap", path("u.emap"), "--k", "0", "--out", path("e.pbm")});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(pbm_to_bitmap(dir_ / "e.pbm"), Bitmap(32, 32));

  r = invoke({"sample", "--emap", path("u.emap"), "--k", "5000", "--out", path("e.pbm")});
  EXPECT_EQ(r.code, cli::kValidation);
  r = invoke({"sample", "--emap", path("none.emap"), "--k", "1", "--out", path("e.pbm")});
  EXPECT_EQ(r.code, cli::kIo);
  EXPECT_EQ(invoke({"sample", "--k", "1", "--out", path("e.pbm")}).code, cli::kUsage);
}

TEST_F(CliTest, SampleMeanSaliencyMatchesBitmap) {
  const auto u = testing::saliency_blob(24, 24, 6, 6, 3, 0.9, 0.05);
  write_emap(u, dir_ / "u.emap");
  cli::SampleRequest rq;
  rq.emap = dir_ / "u.emap";
  rq.k = 30;
  rq.tile = 12;
  rq.seed = 4;
  rq.out_pbm = dir_ / "s.pbm";
  const auto summary = cli::cmd_sample(rq);
  const auto b = pbm_to_bitmap(rq.out_pbm);
  const auto stored = read_emap(rq.emap);
  double total = 0;
  for (std::size_t i = 0; i < b.size(); ++i) total += b[i] ? stored[i] : 0.0;
  EXPECT_EQ(summary.popcount, 30u);
  EXPECT_NEAR(summary.mean_saliency, total / 30, 1e-12);
}

TEST_F(CliTest, CurvesColumnsAndOrdering) {
  save_image(testing::synthetic_em(48, 48, 4), dir_ / "hr2.pgm");
  const auto hr1 = load_image(dir_ / "hr.pgm");
  write_emap(gradient_saliency(hr1), dir_ / "g1.emap");  // > 1 values: rejected below
  const auto r = invoke({"curves", "--hr", path("hr.pgm"), "--hr", path("hr2.pgm"), "--random-seeds", "10",
                         "--out", path("curves.csv"), "--correlation-out", path("corr.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = read_csv(dir_ / "curves.csv");
  ASSERT_EQ(rows[0], (std::vector<std::string>{"fraction", "oracle", "gradient", "random"}));
  ASSERT_EQ(rows.size(), 1 + default_fractions().size());
  EXPECT_EQ(rows.back()[0], "1");
  EXPECT_EQ(std::stod(rows.back()[1]), 0.0);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].size(), 4u);
    EXPECT_LE(std::stod(rows[i][1]), std::stod(rows[i][3]) + 1e-12);
  }
  const auto corr = read_csv(dir_ / "corr.csv");
  EXPECT_EQ(corr[0], (std::vector<std::string>{"estimator", "pooled", "per_image_mean"}));
  EXPECT_EQ(corr[1][0], "gradient");

  EXPECT_EQ(invoke({"curves", "--hr", path("hr.pgm"), "--emap", "bad=" + path("g1.emap"), "--out", path("c.csv")}).code,
            cli::kValidation);
}

TEST_F(CliTest, CurvesWithRoiAndExternalEstimator) {
  const auto hr = load_image(dir_ / "hr.pgm");
  const auto sr = fit_to(upsample(downsample_nearest(hr, 4), 4, Interpolation::bicubic), 48, 48);
  write_emap(raster_cast<ErrorMap>(testing::membrane_probability(hr)), dir_ / "roi_hr.emap");
  write_emap(raster_cast<ErrorMap>(testing::membrane_probability(sr)), dir_ / "roi_sr.emap");
  write_emap(ErrorMap::filled(48, 48, 0.5), dir_ / "flat.emap");
  const auto r = invoke({"curves", "--hr", path("hr.pgm"), "--roi-hr", path("roi_hr.emap"), "--roi-sr",
                         path("roi_sr.emap"), "--emap", "flat=" + path("flat.emap"), "--fractions", "0,0.05,0.1,1",
                         "--out", path("c.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = read_csv(dir_ / "c.csv");
  EXPECT_EQ(rows[0], (std::vector<std::string>{"fraction", "oracle", "gradient", "random", "interest", "entropy", "flat"}));
  EXPECT_EQ(rows.size(), 5u);
  EXPECT_EQ(std::stod(rows[4][1]), 0.0);

  // Misaligned inputs.
  write_emap(ErrorMap::filled(8, 8, 0.5), dir_ / "small.emap");
  EXPECT_EQ(invoke({"curves", "--hr", path("hr.pgm"), "--emap", "s=" + path("small.emap"), "--out", path("d.csv")}).code,
            cli::kValidation);
  EXPECT_EQ(invoke({"curves", "--hr", path("hr.pgm"), "--roi-hr", path("roi_hr.emap"), "--out", path("d.csv")}).code,
            cli::kValidation);
}

TEST_F(CliTest, EvalRoi) {
  write_emap(ErrorMap(2, 1, {0.2, 0.8}), dir_ / "a.emap");
  write_emap(ErrorMap(2, 1, {0.4, 0.4}), dir_ / "b.emap");
  const auto r = invoke({"eval-roi", "--roi-hr", path("a.emap"), "--roi-out", path("b.emap"), "--out", path("roi.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = read_csv(dir_ / "roi.csv");
  EXPECT_EQ(rows[0][0], "roi_residual_l1");
  EXPECT_NEAR(std::stod(rows[1][0]), 0.3, 1e-7);
  write_emap(ErrorMap(1, 2, {0.2, 0.8}), dir_ / "c.emap");
  EXPECT_EQ(invoke({"eval-roi", "--roi-hr", path("a.emap"), "--roi-out", path("c.emap"), "--out", path("r.csv")}).code,
            cli::kValidation);
}

TEST_F(CliTest, BinaryReportsErrorsOnStderrOnly) {
  const std::string cmd = std::string(SPARSESCAN_CLI_PATH) + " scan --config " + path("absent.cfg") + " 2>" +
                          path("stderr.txt") + " >" + path("stdout.txt");
  const int status = std::system(cmd.c_str());
  EXPECT_EQ(WEXITSTATUS(status), cli::kIo);
  EXPECT_NE(read_text(dir_ / "stderr.txt").find("absent.cfg"), std::string::npos);
  EXPECT_TRUE(read_text(dir_ / "stdout.txt").empty());
}

}  // namespace
}  // namespace sparsescan
