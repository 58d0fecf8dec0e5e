#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "sparsescan/raster.hpp"

namespace sparsescan::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kValidation = 2, kIo = 3 };

// Parses argv and dispatches to a verb: scan, sweep, sample, curves, eval-roi.
// Data goes to files (and, for `sample`, a short stdout summary); diagnostics
// go to `err` as a single line.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

struct SampleRequest {
  std::filesystem::path emap;
  std::size_t k = 0;
  double gamma = 2.0;
  double sigma_s = 2.0;
  int tile = 32;
  std::uint64_t seed = 0;
  std::filesystem::path out_pbm;
  int threads = 0;
};

struct SampleSummary {
  std::size_t popcount = 0;
  double mean_saliency = 0.0;
};

SampleSummary cmd_sample(const SampleRequest& request);

// Named estimator with one EMAP path per input image.
struct ExternalEstimator {
  std::string name;
  std::vector<std::filesystem::path> paths;
};

struct CurvesRequest {
  std::vector<std::filesystem::path> hr;
  std::vector<std::filesystem::path> sr;  // empty: reconstruct from hr
  int rate = 4;
  std::string reconstruction = "bicubic";
  std::vector<std::filesystem::path> roi_hr;
  std::vector<std::filesystem::path> roi_sr;
  std::vector<ExternalEstimator> external;
  int random_seeds = 50;
  std::uint64_t seed = 0;
  std::vector<double> fractions;  // empty: default grid
  std::filesystem::path out_csv;
  std::filesystem::path correlation_csv;  // optional
};

// Column names written to the curves CSV, in order.
std::vector<std::string> cmd_curves(const CurvesRequest& request);

struct EvalRoiRequest {
  std::filesystem::path roi_hr;
  std::filesystem::path roi_out;
  std::filesystem::path out_csv;
};

double cmd_eval_roi(const EvalRoiRequest& request);

}  // namespace sparsescan::cli
