#include "sparsescan/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>

#include "sparsescan/metrics.hpp"
#include "sparsescan/saliency.hpp"

namespace sparsescan {
namespace fs = std::filesystem;

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return buf;
}

double acquisition_cost(const Image& hr, const Image& out, const Bitmap& scanned, double lambda) {
  require_same_shape(hr, out, "acquisition_cost");
  if (scanned.width() != hr.width() || scanned.height() != hr.height()) {
    throw ValidationError("acquisition_cost: bitmap dimension mismatch");
  }
  const double scan_fraction = static_cast<double>(scanned.popcount()) / static_cast<double>(hr.size());
  return l1_loss(hr, out) + lambda * scan_fraction;
}

std::size_t rescan_budget(double total_scan_rate, std::size_t total_pixels, std::size_t initial_pixels) {
  const double wanted = std::round(total_scan_rate * static_cast<double>(total_pixels));
  if (wanted < static_cast<double>(initial_pixels)) {
    throw ValidationError("rescan budget is negative: total scan rate " + format_number(total_scan_rate) +
                          " covers " + format_number(wanted) + " pixels but the initial scan already uses " +
                          std::to_string(initial_pixels));
  }
  const auto k = static_cast<std::size_t>(wanted) - initial_pixels;
  if (k > total_pixels - initial_pixels) {
    throw ValidationError("total scan rate " + format_number(total_scan_rate) + " exceeds 1");
  }
  return k;
}

namespace {

ErrorMap zero_on(const ErrorMap& map, const Bitmap& mask) {
  std::vector<double> values(map.values().begin(), map.values().end());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (mask[i]) values[i] = 0.0;
  }
  return ErrorMap(map.width(), map.height(), std::move(values));
}

template <class Raster>
void require_dims(const Raster& r, const Image& hr, const std::string& what) {
  if (r.width() != hr.width() || r.height() != hr.height()) {
    throw ValidationError(what + " is " + std::to_string(r.width()) + "x" + std::to_string(r.height()) +
                          " but the HR image is " + std::to_string(hr.width()) + "x" + std::to_string(hr.height()));
  }
}

}  // namespace

AcquisitionSession::AcquisitionSession(PipelineConfig cfg, int threads)
    : cfg_(std::move(cfg)), threads_(threads) {
  validate(cfg_);
  hr_ = load_image(cfg_.hr_path);
  const int rate = cfg_.downsample_rate;

  // (1) initial scan
  lr_ = downsample_nearest(hr_, rate);
  lattice_ = decimation_lattice(hr_.width(), hr_.height(), rate);

  // (2) reconstruction
  if (const auto* method = std::get_if<Interpolation>(&cfg_.reconstruction)) {
    sr_ = fit_to(upsample(lr_, rate, *method), hr_.width(), hr_.height());
  } else {
    sr_ = load_image(std::get<fs::path>(cfg_.reconstruction));
    require_dims(sr_, hr_, "reconstruction image");
  }

  // (3)+(4) ground truth and estimated error
  std::optional<ProbabilityMap> roi_hr;
  std::optional<ProbabilityMap> roi_sr;
  if (cfg_.roi) {
    roi_hr = load_probability_map(cfg_.roi->hr);
    roi_sr = load_probability_map(cfg_.roi->sr);
    require_dims(*roi_hr, hr_, "ROI map '" + cfg_.roi->hr.string() + "'");
    require_dims(*roi_sr, hr_, "ROI map '" + cfg_.roi->sr.string() + "'");
    truth_ = residual_error(*roi_hr, *roi_sr);
  } else {
    truth_ = residual_error(hr_, sr_);
  }

  ErrorMap estimate;
  if (const auto* kind = std::get_if<EstimatorKind>(&cfg_.estimator)) {
    switch (*kind) {
      case EstimatorKind::oracle: estimate = truth_; break;
      case EstimatorKind::gradient: estimate = gradient_saliency(sr_); break;
      case EstimatorKind::entropy: estimate = entropy_saliency(*roi_sr); break;
      case EstimatorKind::interest: estimate = raster_cast<ErrorMap>(*roi_sr); break;
    }
  } else {
    const auto& path = std::get<fs::path>(cfg_.estimator);
    estimate = load_estimated_error(path);
    require_dims(estimate, hr_, "estimated error '" + path.string() + "'");
  }
  try {
    estimator_correlation_ = pearson(estimate, truth_);
  } catch (const ValidationError&) {
    estimator_correlation_ = std::numeric_limits<double>::quiet_NaN();
  }
  estimate_ = zero_on(estimate, lattice_);
}

AcquisitionSession::~AcquisitionSession() = default;
AcquisitionSession::AcquisitionSession(AcquisitionSession&&) noexcept = default;
AcquisitionSession& AcquisitionSession::operator=(AcquisitionSession&&) noexcept = default;

Bitmap AcquisitionSession::rescan_bitmap(std::size_t k, std::uint64_t seed) {
  switch (cfg_.sampler) {
    case SamplerKind::topk: return topk_bitmap(estimate_, k, lattice_);
    case SamplerKind::random: return random_bitmap(lattice_, k, seed);
    case SamplerKind::wdpp:
      if (k == 0) return Bitmap(hr_.width(), hr_.height());
      if (!sampler_) {
        sampler_ = std::make_unique<TiledWdppSampler>(estimate_, cfg_.tile, WdppParams{cfg_.gamma, cfg_.sigma_s},
                                                      lattice_, threads_);
      }
      return sampler_->sample(k, seed, threads_);
  }
  throw ValidationError("unknown sampler");
}

AcquisitionResult AcquisitionSession::run(double total_scan_rate, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = hr_.size();
  const std::size_t initial = lattice_.popcount();
  const std::size_t k = rescan_budget(total_scan_rate, n, initial);

  // (5) diversified sampling, (6)+(7) rescan and composite
  Bitmap rescan = rescan_bitmap(k, seed);
  Bitmap total = bitmap_union(lattice_, rescan);
  Image output = composite(sr_, hr_, total);

  AcquisitionReport rep;
  rep.target_speedup = 1.0 / total_scan_rate;
  rep.total_pixels = n;
  rep.initial_pixels = initial;
  rep.rescan_pixels = rescan.popcount();
  rep.initial_scan_rate = static_cast<double>(initial) / static_cast<double>(n);
  rep.rescan_rate = static_cast<double>(rep.rescan_pixels) / static_cast<double>(n);
  rep.total_scan_rate = static_cast<double>(total.popcount()) / static_cast<double>(n);
  rep.speedup_factor = static_cast<double>(n) / static_cast<double>(total.popcount());
  rep.residual_l1 = l1_loss(hr_, output);
  rep.psnr = psnr(hr_, output);
  rep.ssim = hr_.width() >= kSsimWindow && hr_.height() >= kSsimWindow ? ssim(hr_, output)
                                                                       : std::numeric_limits<double>::quiet_NaN();
  rep.cost = acquisition_cost(hr_, output, total, cfg_.lambda);
  rep.reconstruction_l1 = l1_loss(hr_, sr_);
  rep.estimator_correlation = estimator_correlation_;
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(rep), std::move(output), std::move(rescan), std::move(total)};
}

AcquisitionResult run_acquisition(const PipelineConfig& cfg, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  AcquisitionSession session(cfg, options.threads);
  AcquisitionResult result = session.run(cfg.total_scan_rate, cfg.seed);
  result.report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (options.out_dir) {
    const fs::path& dir = *options.out_dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
    const fs::path out_image = dir / "out.pgm";
    const fs::path total_pbm = dir / "total_scan.pbm";
    const fs::path rescan_pbm = dir / "rescan.pbm";
    const fs::path report_csv = dir / "report.csv";
    const fs::path summary = dir / "summary.txt";
    save_image(result.output, out_image);
    bitmap_to_pbm(result.total_scan, total_pbm);
    bitmap_to_pbm(result.rescan, rescan_pbm);
    write_report_csv(report_csv, {result.report});
    result.report.artifacts = {out_image, total_pbm, rescan_pbm, report_csv, summary};
    std::ofstream s(summary);
    if (!s) throw IoError("cannot write '" + summary.string() + "'");
    write_summary(s, cfg, result.report);
  }
  return result;
}

std::vector<AcquisitionReport> sweep_speedup(const PipelineConfig& cfg, const std::vector<double>& factors,
                                             const RunOptions& options) {
  // The per-run rate comes from each factor, not from the config.
  PipelineConfig base = cfg;
  base.total_scan_rate = 1.0;
  validate(base);
  const double initial_rate = 1.0 / (static_cast<double>(cfg.downsample_rate) * cfg.downsample_rate);
  for (double f : factors) {
    if (!(f >= 1.0) || 1.0 / f < initial_rate - 1e-12) {
      throw ValidationError("infeasible speedup factor " + format_number(f) + ": must lie in [1, " +
                            std::to_string(cfg.downsample_rate * cfg.downsample_rate) + "]");
    }
  }
  AcquisitionSession session(std::move(base), options.threads);
  std::vector<AcquisitionReport> reports;
  reports.reserve(factors.size());
  for (double f : factors) {
    AcquisitionResult r = session.run(1.0 / f, cfg.seed);
    r.report.target_speedup = f;
    reports.push_back(std::move(r.report));
  }
  if (options.out_dir) {
    std::error_code ec;
    fs::create_directories(*options.out_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + options.out_dir->string() + "': " + ec.message());
    write_report_csv(*options.out_dir / "sweep.csv", reports);
  }
  return reports;
}

void write_report_csv(std::ostream& out, const std::vector<AcquisitionReport>& reports) {
  out << "target_speedup,speedup_factor,total_scan_rate,initial_scan_rate,rescan_rate,total_pixels,"
         "initial_pixels,rescan_pixels,residual_l1,psnr,ssim,cost,reconstruction_l1,estimator_correlation\n";
  for (const auto& r : reports) {
    out << format_number(r.target_speedup) << ',' << format_number(r.speedup_factor) << ','
        << format_number(r.total_scan_rate) << ',' << format_number(r.initial_scan_rate) << ','
        << format_number(r.rescan_rate) << ',' << r.total_pixels << ',' << r.initial_pixels << ','
        << r.rescan_pixels << ',' << format_number(r.residual_l1) << ',' << format_number(r.psnr) << ','
        << format_number(r.ssim) << ',' << format_number(r.cost) << ',' << format_number(r.reconstruction_l1)
        << ',' << format_number(r.estimator_correlation) << '\n';
  }
}

void write_report_csv(const fs::path& path, const std::vector<AcquisitionReport>& reports) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  write_report_csv(out, reports);
  if (!out) throw IoError("write failure on '" + path.string() + "'");
}

void write_summary(std::ostream& out, const PipelineConfig& cfg, const AcquisitionReport& r) {
  out << "# configuration\n";
  write_config(out, cfg);
  out << "\n# acquisition\n";
  out << "pixels          " << r.total_pixels << "\n";
  out << "initial scan    " << r.initial_pixels << " (" << format_number(r.initial_scan_rate) << ")\n";
  out << "rescan          " << r.rescan_pixels << " (" << format_number(r.rescan_rate) << ")\n";
  out << "total scan rate " << format_number(r.total_scan_rate) << "\n";
  out << "speedup         " << format_number(r.speedup_factor) << "x\n";
  out << "\n# quality (I_OUT vs I_HR)\n";
  out << "residual L1     " << format_number(r.residual_l1) << "\n";
  out << "PSNR            " << format_number(r.psnr) << " dB\n";
  out << "SSIM            " << format_number(r.ssim) << "\n";
  out << "cost C          " << format_number(r.cost) << "\n";
  out << "no-rescan L1    " << format_number(r.reconstruction_l1) << "\n";
  out << "estimate corr.  " << format_number(r.estimator_correlation) << "\n";
  // Excluded from the speedup, which counts microscope pixels only.
  out << "\nwall clock      " << format_number(r.wall_seconds) << " s\n";
  if (!r.artifacts.empty()) {
    out << "\n# artifacts\n";
    for (const auto& p : r.artifacts) out << p.string() << "\n";
  }
}

}  // namespace sparsescan
