#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "sparsescan/raster.hpp"
#include "sparsescan/reconstruct.hpp"
#include "sparsescan/wdpp.hpp"

namespace sparsescan {

enum class EstimatorKind { oracle, gradient, entropy, interest };
enum class SamplerKind { wdpp, topk, random };

std::string to_string(EstimatorKind kind);
std::string to_string(SamplerKind kind);
SamplerKind parse_sampler(std::string_view name);

struct RoiMaps {
  std::filesystem::path hr;  // F_ROI(I_HR)
  std::filesystem::path sr;  // F_ROI(I_SR)
};

// One acquisition run. Keys of the flat config file match the field names.
struct PipelineConfig {
  std::filesystem::path hr_path;
  int downsample_rate = 4;
  // Interpolation method, or a precomputed I_SR image file.
  std::variant<Interpolation, std::filesystem::path> reconstruction = Interpolation::bicubic;
  // Built-in estimator, or an EMAP file of estimated error in [0,1].
  std::variant<EstimatorKind, std::filesystem::path> estimator = EstimatorKind::oracle;
  std::optional<RoiMaps> roi;
  SamplerKind sampler = SamplerKind::wdpp;
  double gamma = kDefaultGamma;
  double sigma_s = kDefaultSigma;
  int tile = kDefaultTile;
  std::uint64_t seed = 0;
  double total_scan_rate = 0.1;
  double lambda = 0.0;
};

inline constexpr const char* kConfigKeys[] = {
    "hr_path", "downsample_rate", "reconstruction", "estimator", "roi", "sampler",
    "gamma",   "sigma_s",         "tile",           "seed",      "total_scan_rate", "lambda"};

// Applies one `key = value` setting; relative paths resolve against base_dir.
void set_config_value(PipelineConfig& cfg, std::string_view key, std::string_view value,
                      const std::filesystem::path& base_dir);

// Flat UTF-8 `key = value` lines; '#' starts a comment. Unknown or repeated
// keys are errors.
PipelineConfig parse_config(std::string_view text, const std::filesystem::path& base_dir);
PipelineConfig load_config(const std::filesystem::path& path);

// Checks field ranges and cross-field constraints that do not need file access.
void validate(const PipelineConfig& cfg);

void write_config(std::ostream& out, const PipelineConfig& cfg);

struct AcquisitionReport {
  double target_speedup = 0.0;
  std::size_t total_pixels = 0;
  std::size_t initial_pixels = 0;
  std::size_t rescan_pixels = 0;
  double initial_scan_rate = 0.0;
  double rescan_rate = 0.0;
  double total_scan_rate = 0.0;
  double speedup_factor = 0.0;
  double residual_l1 = 0.0;
  double psnr = 0.0;
  double ssim = 0.0;
  double cost = 0.0;
  // I_SR against I_HR, before any rescan.
  double reconstruction_l1 = 0.0;
  // Pearson correlation of the estimate with the ground-truth error; NaN if undefined.
  double estimator_correlation = 0.0;
  double wall_seconds = 0.0;
  std::vector<std::filesystem::path> artifacts;
};

struct AcquisitionResult {
  AcquisitionReport report;
  Image output;
  Bitmap rescan;
  Bitmap total_scan;
};

// C = L1(hr, out) + lambda * popcount(scanned) / N.
double acquisition_cost(const Image& hr, const Image& out, const Bitmap& scanned, double lambda);

// Rescan budget K for a total scan rate: round(rate N) minus the lattice size.
std::size_t rescan_budget(double total_scan_rate, std::size_t total_pixels, std::size_t initial_pixels);

// Holds everything that does not depend on the budget or seed: the initial
// scan, reconstruction, ground-truth and estimated error, and (lazily) the
// tiled WDPP decomposition. Runs at different rates reuse it.
class AcquisitionSession {
 public:
  explicit AcquisitionSession(PipelineConfig cfg, int threads = 0);
  ~AcquisitionSession();
  AcquisitionSession(AcquisitionSession&&) noexcept;
  AcquisitionSession& operator=(AcquisitionSession&&) noexcept;

  const PipelineConfig& config() const noexcept { return cfg_; }
  const Image& hr() const noexcept { return hr_; }
  const Image& lr() const noexcept { return lr_; }
  const Image& sr() const noexcept { return sr_; }
  const Bitmap& lattice() const noexcept { return lattice_; }
  const ErrorMap& truth() const noexcept { return truth_; }
  // Estimator output with the initial-scan lattice zeroed.
  const ErrorMap& estimate() const noexcept { return estimate_; }

  Bitmap rescan_bitmap(std::size_t k, std::uint64_t seed);
  AcquisitionResult run(double total_scan_rate, std::uint64_t seed);

 private:
  PipelineConfig cfg_;
  int threads_;
  Image hr_;
  Image lr_;
  Image sr_;
  Bitmap lattice_;
  ErrorMap truth_;
  ErrorMap estimate_;
  double estimator_correlation_ = 0.0;
  std::unique_ptr<TiledWdppSampler> sampler_;
};

struct RunOptions {
  int threads = 0;
  std::optional<std::filesystem::path> out_dir;
};

// Initial scan, reconstruction, error estimate, rescan selection, composite,
// metrics. With out_dir set, writes out.pgm, total_scan.pbm, rescan.pbm,
// report.csv and summary.txt there.
AcquisitionResult run_acquisition(const PipelineConfig& cfg, const RunOptions& options = {});

// One run per target speedup f at total scan rate 1/f. With out_dir set,
// writes sweep.csv.
std::vector<AcquisitionReport> sweep_speedup(const PipelineConfig& cfg, const std::vector<double>& factors,
                                             const RunOptions& options = {});

void write_report_csv(std::ostream& out, const std::vector<AcquisitionReport>& reports);
void write_report_csv(const std::filesystem::path& path, const std::vector<AcquisitionReport>& reports);
void write_summary(std::ostream& out, const PipelineConfig& cfg, const AcquisitionReport& report);

// Number formatting shared by every CSV the tools emit.
std::string format_number(double value);

}  // namespace sparsescan
